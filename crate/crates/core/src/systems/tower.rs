use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DynamicalSystem, InverseLimitPoint, Point, PointKind, SystemHandle};
use crate::error::{Error, Result};

/// Residual allowed between `pi(T x)` and `T pi(x)`, and along threads.
pub const SEMICONJUGACY_TOLERANCE: f64 = 1e-9;
const VALIDATION_SAMPLES: usize = 256;

/// Factor map from level `i + 1` down to level `i`.
#[derive(Clone)]
pub struct FactorMap(pub Arc<dyn Fn(&Point) -> Point + Send + Sync>);

impl FactorMap {
    pub fn new(f: impl Fn(&Point) -> Point + Send + Sync + 'static) -> Self {
        FactorMap(Arc::new(f))
    }

    pub fn identity() -> Self {
        FactorMap::new(|p| p.clone())
    }

    /// Keeps the first `m` torus coordinates.
    pub fn torus_projection(m: usize) -> Self {
        FactorMap::new(move |p| Point::torus(&p.coords().expect("torus point")[..m]))
    }

    pub fn apply(&self, p: &Point) -> Point {
        (self.0)(p)
    }
}

impl fmt::Debug for FactorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FactorMap")
    }
}

/// Truncated inverse limit `X_1 <- X_2 <- ... <- X_N` with `rho = sum_i 2^-i rho_i`.
#[derive(Clone, Debug)]
pub struct InverseLimit {
    pub levels: Vec<SystemHandle>,
    pub maps: Vec<FactorMap>,
}

pub fn make_inverse_limit(levels: Vec<SystemHandle>, maps: Vec<FactorMap>) -> Result<SystemHandle> {
    Ok(SystemHandle::new(InverseLimit::new(levels, maps)?))
}

impl InverseLimit {
    pub fn new(levels: Vec<SystemHandle>, maps: Vec<FactorMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Structure("inverse limit needs at least one level".into()));
        }
        if maps.len() + 1 != levels.len() {
            return Err(Error::Structure(format!(
                "{} levels need {} factor maps, got {}",
                levels.len(),
                levels.len() - 1,
                maps.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x7077);
        for (i, map) in maps.iter().enumerate() {
            let (lo, hi) = (&levels[i], &levels[i + 1]);
            for _ in 0..VALIDATION_SAMPLES {
                let x = hi.sample(&mut rng);
                let r = lo.metric(&map.apply(&hi.step(&x)), &lo.step(&map.apply(&x)));
                if !(r <= SEMICONJUGACY_TOLERANCE) {
                    return Err(Error::Structure(format!(
                        "factor map {} -> {} is not a semiconjugacy: residual {r:e}",
                        i + 1,
                        i
                    )));
                }
            }
        }
        Ok(InverseLimit { levels, maps })
    }

    /// Thread over a top-level point.
    pub fn thread(&self, top: Point) -> Point {
        let mut levels = vec![top];
        for map in self.maps.iter().rev() {
            let next = map.apply(levels.last().unwrap());
            levels.push(next);
        }
        levels.reverse();
        Point::Thread(InverseLimitPoint { levels })
    }

    /// Largest residual `rho_i(pi_i(x_{i+1}), x_i)` along a thread.
    pub fn compatibility(&self, p: &Point) -> f64 {
        let t = p.as_thread().expect("inverse limit expects threads");
        self.maps
            .iter()
            .enumerate()
            .map(|(i, m)| self.levels[i].metric(&m.apply(&t.levels[i + 1]), &t.levels[i]))
            .fold(0.0, f64::max)
    }

    fn map_levels(&self, p: &Point, f: impl Fn(&SystemHandle, &Point) -> Point) -> Point {
        let t = p.as_thread().expect("inverse limit expects threads");
        Point::Thread(InverseLimitPoint {
            levels: self.levels.iter().zip(&t.levels).map(|(s, x)| f(s, x)).collect(),
        })
    }
}

impl DynamicalSystem for InverseLimit {
    fn name(&self) -> String {
        let names: Vec<String> = self.levels.iter().map(|l| l.name()).collect();
        format!("tower[{}]", names.join(" <- "))
    }

    fn point_kind(&self) -> PointKind {
        PointKind::Product
    }

    fn step(&self, p: &Point) -> Point {
        self.map_levels(p, |s, x| s.step(x))
    }

    fn inverse_step(&self, p: &Point) -> Point {
        self.map_levels(p, |s, x| s.inverse_step(x))
    }

    fn step_n(&self, p: &Point, n: i64) -> Point {
        self.map_levels(p, |s, x| s.step_n(x, n))
    }

    fn metric(&self, p: &Point, q: &Point) -> f64 {
        let (a, b) = (p.as_thread().unwrap(), q.as_thread().unwrap());
        let mut w = 1.0;
        let mut d = 0.0;
        for ((s, x), y) in self.levels.iter().zip(&a.levels).zip(&b.levels) {
            w *= 0.5;
            d += w * s.metric(x, y);
        }
        d
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        self.thread(self.levels.last().unwrap().sample(rng))
    }

    fn diameter(&self) -> f64 {
        let mut w = 1.0;
        self.levels
            .iter()
            .map(|s| {
                w *= 0.5;
                w * s.diameter()
            })
            .sum()
    }

    fn grid_dims(&self) -> usize {
        self.levels.last().unwrap().grid_dims()
    }

    fn grid(&self, res: &[usize]) -> Option<Vec<Point>> {
        let top = self.levels.last().unwrap().grid(res)?;
        Some(top.into_iter().map(|p| self.thread(p)).collect())
    }

    fn flags(&self) -> Vec<String> {
        self.levels.iter().flat_map(|l| l.flags()).collect()
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "name": "tower",
            "levels": self.levels.iter().map(|l| l.describe()).collect::<Vec<_>>(),
        })
    }
}
