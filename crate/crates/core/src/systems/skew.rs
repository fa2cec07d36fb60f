use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{expect_torus, torus_dist, unit_grid, DynamicalSystem, Point, PointKind, SystemHandle};

/// `T(x, y) = (x + alpha, y + x)` on `T^2`.
#[derive(Clone, Debug)]
pub struct SkewProduct {
    pub alpha: f64,
}

pub fn make_skew_product(alpha: f64) -> SystemHandle {
    SystemHandle::new(SkewProduct { alpha })
}

impl DynamicalSystem for SkewProduct {
    fn name(&self) -> String {
        format!("skew(alpha={})", self.alpha)
    }

    fn point_kind(&self) -> PointKind {
        PointKind::TorusVector
    }

    fn step(&self, p: &Point) -> Point {
        let c = expect_torus(p);
        Point::torus(&[c[0] + self.alpha, c[1] + c[0]])
    }

    fn inverse_step(&self, p: &Point) -> Point {
        let c = expect_torus(p);
        let x = c[0] - self.alpha;
        Point::torus(&[x, c[1] - x])
    }

    /// `T^n(x, y) = (x + n alpha, y + n x + n(n-1)/2 alpha)`.
    fn step_n(&self, p: &Point, n: i64) -> Point {
        let c = expect_torus(p);
        let nf = n as f64;
        let tri = super::wrap01((n as f64) * ((n - 1) as f64) / 2.0 * self.alpha);
        let nx = super::wrap01(nf * c[0]);
        Point::torus(&[c[0] + super::wrap01(nf * self.alpha), c[1] + nx + tri])
    }

    fn metric(&self, p: &Point, q: &Point) -> f64 {
        torus_dist(expect_torus(p), expect_torus(q))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        Point::torus(&[rng.gen::<f64>(), rng.gen::<f64>()])
    }

    fn diameter(&self) -> f64 {
        0.5
    }

    fn grid_dims(&self) -> usize {
        2
    }

    fn grid(&self, res: &[usize]) -> Option<Vec<Point>> {
        Some(unit_grid(res).into_iter().map(|c| Point::torus(&c)).collect())
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "name": "skew", "alpha": self.alpha })
    }
}
