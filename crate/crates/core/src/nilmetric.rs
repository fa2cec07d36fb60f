//! Right-invariant metric on a nilpotent group and its quotient by the lattice.
//!
//! The exact metric is an infimum over finite chains of one-hop costs
//! `min(|psi(x y^-1)|, |psi(y x^-1)|)`. We use the single-hop value, which is an
//! upper bound, exactly right-invariant and locally equivalent to the chain
//! metric. Everything downstream (shadowing nets, complexity curves, RP search)
//! only needs a topologically equivalent metric. The one-hop quotient distance
//! is symmetric and vanishes exactly on the diagonal, but it can violate the
//! triangle inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::{GroupElement, MalcevCoord, NilGroupSpec};
use crate::systems::nil::NilSystem;

pub const POINT_TOLERANCE: f64 = 1e-12;

/// Canonical representative of a coset `x Gamma`, with `psi` in `[0,1)^m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientPoint {
    rep: MalcevCoord,
}

impl QuotientPoint {
    /// Reduces an arbitrary group element to its coset representative.
    pub fn from_element(g: &GroupElement) -> Self {
        Self::reduce(&g.group, &g.coord)
    }

    pub fn reduce(group: &NilGroupSpec, t: &MalcevCoord) -> Self {
        QuotientPoint {
            rep: group.factorize(t).0,
        }
    }

    /// Trusts the caller that `t` already lies in `[0,1)^m`.
    pub(crate) fn from_reduced(t: MalcevCoord) -> Self {
        QuotientPoint { rep: t }
    }

    pub fn rep(&self) -> &MalcevCoord {
        &self.rep
    }

    pub fn coords(&self) -> &[f64] {
        self.rep.as_slice()
    }

    pub fn approx_eq(&self, other: &QuotientPoint, tol: f64) -> bool {
        self.rep.len() == other.rep.len()
            && self
                .coords()
                .iter()
                .zip(other.coords())
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl PartialEq for QuotientPoint {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, POINT_TOLERANCE)
    }
}

/// Lattice-search parameters for the quotient metric.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricParams {
    /// Lattice radius `C`; `None` uses `2 + |psi(p)| + |psi(q)|`.
    pub gamma_bound: Option<f64>,
    /// Largest admissible number of integer cells `(2 ceil(C) + 1)^m`.
    pub cell_budget: u64,
    pub tolerance: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            gamma_bound: None,
            cell_budget: 1 << 20,
            tolerance: POINT_TOLERANCE,
        }
    }
}

impl MetricParams {
    pub fn with_bound(c: f64) -> Result<Self> {
        let p = MetricParams {
            gamma_bound: Some(c),
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.gamma_bound {
            if !(c >= 1.0) || !c.is_finite() {
                return Err(Error::Precondition(format!("gamma bound must be >= 1, got {c}")));
            }
        }
        Ok(())
    }

    fn radius(&self, p: &MalcevCoord, q: &MalcevCoord) -> f64 {
        self.gamma_bound
            .unwrap_or_else(|| 2.0 + p.sup_norm() + q.sup_norm())
    }
}

/// One-hop distance `min(|psi(x y^-1)|, |psi(y x^-1)|)` on `G`.
pub fn dist_group(group: &NilGroupSpec, x: &MalcevCoord, y: &MalcevCoord) -> f64 {
    if x == y {
        return 0.0;
    }
    let a = group.mul(x, &group.inv(y)).sup_norm();
    let b = group.mul(y, &group.inv(x)).sup_norm();
    a.min(b)
}

pub fn dist_group_elements(x: &GroupElement, y: &GroupElement) -> Result<f64> {
    if x.coord.len() != y.coord.len() || *x.group != *y.group {
        return Err(Error::Structure("elements belong to different groups".into()));
    }
    Ok(dist_group(&x.group, &x.coord, &y.coord))
}

/// `min { dist_group(p, q gamma) : gamma in Gamma, |psi(gamma)| <= C }`.
pub fn dist_quotient(
    group: &NilGroupSpec,
    p: &QuotientPoint,
    q: &QuotientPoint,
    params: &MetricParams,
) -> Result<f64> {
    let m = group.dimension;
    if p.rep.len() != m || q.rep.len() != m {
        return Err(Error::Structure("quotient point dimension mismatch".into()));
    }
    let radius = params.radius(&p.rep, &q.rep).ceil();
    let cells = (2.0 * radius + 1.0).powi(m as i32);
    if cells > params.cell_budget as f64 {
        return Err(Error::Budget(format!(
            "lattice box of radius {radius} in dimension {m} has {cells} cells (budget {})",
            params.cell_budget
        )));
    }
    // evaluate in a fixed argument order so the result is bitwise symmetric
    let (p, q) = match lex_cmp(p.coords(), q.coords()) {
        std::cmp::Ordering::Equal => return Ok(0.0),
        std::cmp::Ordering::Less => (p, q),
        std::cmp::Ordering::Greater => (q, p),
    };
    Ok(LatticeSearch::new(group, p.coords(), q.coords(), radius as i64).run())
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Branch and bound over lattice elements. Coordinate `i` of both one-hop
/// products depends on `n_i` with coefficient `-1` resp. `+1` plus a
/// polynomial in `n_1..n_{i-1}`, so each level only needs a few integers.
struct LatticeSearch<'a> {
    group: &'a NilGroupSpec,
    p: &'a [f64],
    q: &'a [f64],
    pinv: Vec<f64>,
    radius: i64,
    best: f64,
    gamma: Vec<f64>,
    qg: Vec<f64>,
    qg_inv: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl<'a> LatticeSearch<'a> {
    fn new(group: &'a NilGroupSpec, p: &'a [f64], q: &'a [f64], radius: i64) -> Self {
        let m = group.dimension;
        let mut pinv = vec![0.0; m];
        group.inv_prefix_into(p, m, &mut pinv);
        LatticeSearch {
            group,
            p,
            q,
            pinv,
            radius,
            best: f64::INFINITY,
            gamma: vec![0.0; m],
            qg: vec![0.0; m],
            qg_inv: vec![0.0; m],
            a: vec![0.0; m],
            b: vec![0.0; m],
        }
    }

    fn run(mut self) -> f64 {
        self.descend(0, 0.0, 0.0);
        self.best
    }

    /// Coordinate `i` of both products for the current `gamma` prefix.
    fn level(&mut self, i: usize) -> (f64, f64) {
        let g = self.group;
        let len = i + 1;
        g.mul_prefix_into(self.q, &self.gamma, len, &mut self.qg);
        g.inv_prefix_into(&self.qg, len, &mut self.qg_inv);
        g.mul_prefix_into(self.p, &self.qg_inv, len, &mut self.a);
        g.mul_prefix_into(&self.qg, &self.pinv, len, &mut self.b);
        (self.a[i], self.b[i])
    }

    fn descend(&mut self, i: usize, max_a: f64, max_b: f64) {
        let m = self.group.dimension;
        if i == m {
            let v = max_a.min(max_b);
            if v < self.best {
                self.best = v;
            }
            return;
        }
        self.gamma[i] = 0.0;
        let (ca, cb) = self.level(i);
        // a_i(n) = ca - n, b_i(n) = cb + n
        let mut candidates: Vec<i64> = Vec::new();
        let r = self.radius;
        let mut push_range = |center: f64, width: f64| {
            let (lo, hi) = if width.is_finite() {
                ((center - width).floor() as i64, (center + width).ceil() as i64)
            } else {
                (-r, r)
            };
            for n in lo.max(-r)..=hi.min(r) {
                candidates.push(n);
            }
        };
        let width = self.best;
        push_range(ca, width);
        push_range(-cb, width);
        candidates.sort_by_key(|&n| ((ca - n as f64).abs().min((cb + n as f64).abs()) * 1e9) as i64);
        let mut seen = std::collections::HashSet::new();
        for n in candidates {
            if !seen.insert(n) {
                continue;
            }
            let na = max_a.max((ca - n as f64).abs());
            let nb = max_b.max((cb + n as f64).abs());
            if na.min(nb) >= self.best {
                continue;
            }
            self.gamma[i] = n as f64;
            self.descend(i + 1, na, nb);
        }
        self.gamma[i] = 0.0;
    }
}

/// Exhaustive lattice enumeration; reference implementation for tests and audits.
pub fn dist_quotient_brute_force(
    group: &NilGroupSpec,
    p: &QuotientPoint,
    q: &QuotientPoint,
    radius: i64,
) -> f64 {
    let m = group.dimension;
    let mut n = vec![-radius; m];
    let mut best = f64::INFINITY;
    loop {
        let gamma = MalcevCoord::from_vec_unchecked(n.iter().map(|&v| v as f64).collect());
        let qg = group.mul(&q.rep, &gamma);
        best = best.min(dist_group(group, &p.rep, &qg));
        let mut k = 0;
        loop {
            if k == m {
                return best;
            }
            n[k] += 1;
            if n[k] > radius {
                n[k] = -radius;
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// Growth of `d(T^n x, T^n y) / d(x, y)` along a nilsystem orbit.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub initial_distance: f64,
    pub ratios: Vec<(u64, f64)>,
    /// Least-squares slope of `log ratio` against `log n`.
    pub slope: f64,
}

pub fn orbit_distance_growth(
    sys: &NilSystem,
    x: &QuotientPoint,
    y: &QuotientPoint,
    n_max: u64,
) -> Result<GrowthReport> {
    let d0 = sys.quotient_distance(x, y)?;
    if d0 <= 0.0 {
        return Err(Error::Precondition(
            "orbit_distance_growth needs two distinct points".into(),
        ));
    }
    let mut xs = x.clone();
    let mut ys = y.clone();
    let mut ratios = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        xs = sys.translate(&xs);
        ys = sys.translate(&ys);
        ratios.push((n, sys.quotient_distance(&xs, &ys)? / d0));
    }
    let pts: Vec<(f64, f64)> = ratios
        .iter()
        .filter(|(_, r)| *r > 0.0)
        .map(|&(n, r)| ((n as f64).ln(), r.ln()))
        .collect();
    let slope = crate::stats::linear_fit(&pts).map(|f| f.slope).unwrap_or(0.0);
    Ok(GrowthReport {
        initial_distance: d0,
        ratios,
        slope,
    })
}
