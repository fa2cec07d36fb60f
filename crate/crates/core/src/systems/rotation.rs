use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{expect_torus, detect_rational, torus_dist, unit_grid, wrap01, DynamicalSystem, Point, PointKind, SystemHandle};

/// Translation `x -> x + alpha` on `T^m`.
#[derive(Clone, Debug)]
pub struct Rotation {
    pub alpha: Vec<f64>,
}

pub fn make_rotation(alpha: Vec<f64>) -> SystemHandle {
    SystemHandle::new(Rotation { alpha })
}

impl Rotation {
    fn shift(&self, p: &Point, sign: f64) -> Point {
        let x = expect_torus(p);
        Point::torus(
            &x.iter()
                .zip(&self.alpha)
                .map(|(a, b)| a + sign * b)
                .collect::<Vec<_>>(),
        )
    }
}

impl DynamicalSystem for Rotation {
    fn name(&self) -> String {
        format!("rotation{:?}", self.alpha)
    }

    fn point_kind(&self) -> PointKind {
        PointKind::TorusVector
    }

    fn step(&self, p: &Point) -> Point {
        self.shift(p, 1.0)
    }

    fn inverse_step(&self, p: &Point) -> Point {
        self.shift(p, -1.0)
    }

    fn step_n(&self, p: &Point, n: i64) -> Point {
        let x = expect_torus(p);
        Point::torus(
            &x.iter()
                .zip(&self.alpha)
                .map(|(a, b)| a + wrap01(n as f64 * b))
                .collect::<Vec<_>>(),
        )
    }

    fn metric(&self, p: &Point, q: &Point) -> f64 {
        torus_dist(expect_torus(p), expect_torus(q))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        Point::torus(&(0..self.alpha.len()).map(|_| rng.gen::<f64>()).collect::<Vec<_>>())
    }

    fn diameter(&self) -> f64 {
        0.5
    }

    fn grid_dims(&self) -> usize {
        self.alpha.len()
    }

    fn grid(&self, res: &[usize]) -> Option<Vec<Point>> {
        Some(unit_grid(res).into_iter().map(|c| Point::torus(&c)).collect())
    }

    fn flags(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, a) in self.alpha.iter().enumerate() {
            if let Some((p, q)) = detect_rational(wrap01(*a)) {
                out.push(format!(
                    "alpha[{i}] = {a} is rational ({p}/{q}): rotation is not minimal"
                ));
            }
        }
        out
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "name": "rotation", "alpha": self.alpha })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::GOLDEN;
    use rand::SeedableRng;

    #[test]
    fn zero_rotation_is_identity() {
        let r = make_rotation(vec![0.0]);
        let p = Point::torus(&[0.3]);
        assert_eq!(r.step(&p), p);
        assert!(!r.flags().is_empty());
    }

    #[test]
    fn quarter_rotation_has_period_four() {
        let r = make_rotation(vec![0.25]);
        let orbit = r.orbit(&Point::torus(&[0.0]), 4);
        let xs: Vec<f64> = orbit.iter().map(|p| p.coords().unwrap()[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 0.0]);
    }

    #[test]
    fn golden_orbit() {
        let r = make_rotation(vec![GOLDEN]);
        let orbit = r.orbit(&Point::torus(&[0.0]), 3);
        let want = [0.618_033_988_749_894_9, 0.236_067_977_499_789_8, 0.854_101_966_249_684_7];
        for (p, w) in orbit[1..].iter().zip(want) {
            assert!((p.coords().unwrap()[0] - w).abs() < 1e-12);
        }
        assert!(r.flags().is_empty());
    }

    #[test]
    fn isometry_and_invertibility() {
        let r = make_rotation(vec![GOLDEN, 0.2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = r.sample(&mut rng);
            let y = r.sample(&mut rng);
            assert!((r.metric(&r.step(&x), &r.step(&y)) - r.metric(&x, &y)).abs() <= 1e-12);
            assert!(r.metric(&r.inverse_step(&r.step(&x)), &x) <= 1e-9);
            assert!(r.metric(&r.step_n(&x, 37), &r.step_n(&r.step_n(&x, 40), -3)) < 1e-12);
        }
    }
}
