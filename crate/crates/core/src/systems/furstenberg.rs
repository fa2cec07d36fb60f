//! Skew product `(theta, s) -> (theta + alpha, s + lambda h_K(theta))` on `T^2`
//! whose cocycle is a coboundary at every finite truncation.
//!
//! Terms come in pairs `+-k` with frequencies `+-n_k`, so the truncated sums are
//! real:
//!
//! `H_K(theta) = sum_k (2/k) cos(2 pi n_k theta)` and `h_K = H_K(. + alpha) - H_K`.
//!
//! Because `h_K` is an exact coboundary, `s_n = s_0 + lambda (H_K(theta_n) - H_K(theta_0))`,
//! which gives an `O(K)` jump to any time.

use std::f64::consts::TAU;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{expect_torus, torus_dist, unit_grid, wrap01, DynamicalSystem, Point, PointKind, SystemHandle};
use crate::error::{Error, Result};

/// One frequency pair `+-n_k` with weight `1/k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: u32,
    pub n_k: i64,
}

/// Rotation number and frequency list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FurstenbergRecipe {
    pub alpha: f64,
    pub terms: Vec<Term>,
}

/// Partial quotients of the default rotation number.
pub const DEFAULT_PARTIAL_QUOTIENTS: [u64; 4] = [10, 100, 1000, 10_000];

/// Value of the continued fraction `[0; a_1, a_2, ...]` and its denominators `q_1, q_2, ...`.
pub fn continued_fraction(partial: &[u64]) -> (f64, Vec<u64>) {
    let mut x = 0.0f64;
    for &a in partial.iter().rev() {
        x = 1.0 / (a as f64 + x);
    }
    let (mut q0, mut q1) = (0u64, 1u64);
    let mut qs = Vec::with_capacity(partial.len());
    for &a in partial {
        let q2 = a * q1 + q0;
        qs.push(q2);
        q0 = q1;
        q1 = q2;
    }
    (x, qs)
}

impl FurstenbergRecipe {
    /// `alpha = [0; 10, 100, 1000, 10000]`, `n_k = k q_2` with `q_2 = 1001`.
    ///
    /// `|| q_2 alpha ||` is about `1e-6`, so every `h_K` coefficient is tiny while
    /// `H_K` keeps weights `2/k`.
    pub fn default_recipe(k_max: u32) -> Self {
        let (alpha, qs) = continued_fraction(&DEFAULT_PARTIAL_QUOTIENTS);
        let q = qs[1] as i64;
        FurstenbergRecipe {
            alpha,
            terms: (1..=k_max).map(|k| Term { k, n_k: k as i64 * q }).collect(),
        }
    }

    /// Reads a CSV with columns `k, n_k`.
    pub fn load_terms(path: &Path) -> Result<Vec<Term>> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut out = Vec::new();
        for rec in rdr.deserialize::<Term>() {
            let t = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            if t.k == 0 {
                return Err(Error::Parse("coefficient index k must be positive".into()));
            }
            out.push(t);
        }
        Ok(out)
    }

    /// Per-term `|e^{2 pi i n_k alpha} - 1|` against the target `2^-k / n_k^4`.
    pub fn decay_report(&self) -> Vec<DecayCheck> {
        self.terms
            .iter()
            .map(|t| {
                let x = TAU * t.n_k as f64 * self.alpha;
                let size = ((x.cos() - 1.0).powi(2) + x.sin().powi(2)).sqrt();
                let target = 0.5f64.powi(t.k as i32) / (t.n_k as f64).abs().powi(4);
                DecayCheck { k: t.k, n_k: t.n_k, size, target, ok: size <= target }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayCheck {
    pub k: u32,
    pub n_k: i64,
    pub size: f64,
    pub target: f64,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct FurstenbergSystem {
    pub recipe: FurstenbergRecipe,
    pub lambda: f64,
}

pub fn make_furstenberg(recipe: FurstenbergRecipe, lambda: f64) -> Result<SystemHandle> {
    if !recipe.alpha.is_finite() || !lambda.is_finite() {
        return Err(Error::Precondition("alpha and lambda must be finite".into()));
    }
    Ok(SystemHandle::new(FurstenbergSystem { recipe, lambda }))
}

impl FurstenbergSystem {
    /// `H_K(theta)`.
    pub fn big_h(&self, theta: f64) -> f64 {
        self.recipe
            .terms
            .iter()
            .map(|t| 2.0 / t.k as f64 * (TAU * t.n_k as f64 * theta).cos())
            .sum()
    }

    /// `h_K(theta) = sum_{k != 0} (1/|k|)(e^{2 pi i n_k alpha} - 1) e^{2 pi i n_k theta}`, summed as a complex series.
    pub fn h(&self, theta: f64) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for t in &self.recipe.terms {
            let w = 1.0 / t.k as f64;
            for sign in [1.0, -1.0] {
                let n = sign * t.n_k as f64;
                let (sa, ca) = (TAU * n * self.recipe.alpha).sin_cos();
                let (st, ct) = (TAU * n * theta).sin_cos();
                let (ar, ai) = (ca - 1.0, sa);
                re += w * (ar * ct - ai * st);
                im += w * (ar * st + ai * ct);
            }
        }
        debug_assert!(im.abs() < 1e-9);
        re
    }
}

impl DynamicalSystem for FurstenbergSystem {
    fn name(&self) -> String {
        format!(
            "furstenberg(alpha={}, K={}, lambda={})",
            self.recipe.alpha,
            self.recipe.terms.len(),
            self.lambda
        )
    }

    fn point_kind(&self) -> PointKind {
        PointKind::TorusVector
    }

    fn step(&self, p: &Point) -> Point {
        let c = expect_torus(p);
        Point::torus(&[c[0] + self.recipe.alpha, c[1] + self.lambda * self.h(c[0])])
    }

    fn inverse_step(&self, p: &Point) -> Point {
        let c = expect_torus(p);
        let theta = c[0] - self.recipe.alpha;
        Point::torus(&[theta, c[1] - self.lambda * self.h(wrap01(theta))])
    }

    fn step_n(&self, p: &Point, n: i64) -> Point {
        let c = expect_torus(p);
        let theta = wrap01(c[0] + wrap01(n as f64 * self.recipe.alpha));
        Point::torus(&[theta, c[1] + self.lambda * (self.big_h(theta) - self.big_h(c[0]))])
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

    fn flags(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.recipe.terms.is_empty() {
            out.push("no coefficients: plain product of a rotation and the identity".into());
        }
        let bad = self.recipe.decay_report().iter().filter(|d| !d.ok).count();
        if bad > 0 {
            out.push(format!(
                "{bad} of {} terms miss the decay target |e(n_k alpha) - 1| <= 2^-k / n_k^4",
                self.recipe.terms.len()
            ));
        }
        out
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "name": "furstenberg",
            "alpha": self.recipe.alpha,
            "lambda": self.lambda,
            "terms": self.recipe.terms,
        })
    }
}
