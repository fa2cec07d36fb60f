//! Topological complexity estimates.
//!
//! `r(n, eps)` is estimated by a greedy `(n, eps)`-shadowing net over a finite
//! point set: a uniform grid in the coordinate chart, the exact window list of
//! a symbolic system, or seeded samples. Every count is an upper estimate
//! relative to that point set, not a true minimum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::SearchBudget;
use crate::error::{Error, Result};
use crate::independence::TargetSet;
use crate::stats::{linear_fit, rms_about_mean};
use crate::systems::{Point, SystemHandle};

/// Slack added to `eps` in every shadowing comparison.
pub const SHADOW_TOLERANCE: f64 = 1e-12;
/// Label attached to every estimate.
pub const ESTIMATE_LABEL: &str = "estimate (upper bound relative to grid)";
/// Relative preference margin for simpler growth models.
pub const MODEL_MARGIN: f64 = 0.10;

/// Finite stand-in for the phase space.
#[derive(Clone, Debug)]
pub struct PointSet {
    pub points: Vec<Point>,
    /// `"80x80"`, `"enum"` or `"sample"`.
    pub label: String,
}

/// Grid, window enumeration or sample, in that order of preference.
///
/// Grid resolution comes from the budget, or `ceil(8/eps)` per dimension; a
/// spacing coarser than `eps/4` is refused.
pub fn point_set(sys: &SystemHandle, epsilon: f64, budget: &SearchBudget) -> Result<PointSet> {
    if !(epsilon > 0.0) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    budget.validate()?;
    if let Some(pts) = sys.enumerate(budget.max_points) {
        let pts = pts?;
        return Ok(PointSet { label: format!("enum:{}", pts.len()), points: pts });
    }
    let dims = sys.grid_dims();
    if dims > 0 {
        let res = resolution(dims, epsilon, budget)?;
        let total: f64 = res.iter().map(|&r| r as f64).product();
        if total > budget.max_points as f64 {
            return Err(Error::Budget(format!(
                "grid {res:?} has {total} points, budget is {}",
                budget.max_points
            )));
        }
        if let Some(points) = sys.grid(&res) {
            let label = res.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("x");
            return Ok(PointSet { points, label });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(5);
    let points: Vec<Point> = (0..budget.max_points).map(|_| sys.sample(&mut rng)).collect();
    Ok(PointSet { label: format!("sample:{}", points.len()), points })
}

fn resolution(dims: usize, epsilon: f64, budget: &SearchBudget) -> Result<Vec<usize>> {
    let res: Vec<usize> = match budget.grid_resolution.len() {
        0 => vec![(8.0 / epsilon).ceil() as usize; dims],
        1 => vec![budget.grid_resolution[0]; dims],
        n if n == dims => budget.grid_resolution.clone(),
        n => {
            return Err(Error::Structure(format!(
                "grid resolution has {n} entries for a {dims}-dimensional chart"
            )))
        }
    };
    let limit = epsilon / 4.0;
    for &r in &res {
        let spacing = 1.0 / r as f64;
        if spacing > limit * (1.0 + 1e-9) {
            return Err(Error::GridTooCoarse {
                spacing,
                limit,
                suggested: (4.0 / epsilon).ceil() as usize,
            });
        }
    }
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowingNet {
    /// Indices of the net members in the point set.
    pub centers: Vec<usize>,
    /// For each point, the position in `centers` of the member shadowing it.
    pub assignment: Vec<usize>,
}

impl ShadowingNet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

fn shadows(sys: &SystemHandle, traj: &[Point], p: &Point, tol: f64) -> bool {
    if sys.metric_exceeds(&traj[0], p, tol) {
        return false;
    }
    let mut q = p.clone();
    for c in &traj[1..] {
        q = sys.step(&q);
        if sys.metric_exceeds(c, &q, tol) {
            return false;
        }
    }
    true
}

/// Greedy net in point order: the first point not yet shadowed becomes a member.
pub fn greedy_net(sys: &SystemHandle, points: &[Point], n: u64, epsilon: f64) -> ShadowingNet {
    let tol = epsilon + SHADOW_TOLERANCE;
    let total = points.len();
    let mut assignment = vec![usize::MAX; total];
    let mut centers = Vec::new();
    let mut next = 0;
    loop {
        while next < total && assignment[next] != usize::MAX {
            next += 1;
        }
        if next == total {
            break;
        }
        let traj = sys.orbit(&points[next], n as usize);
        let id = centers.len();
        centers.push(next);
        let hits: Vec<usize> = (next..total)
            .into_par_iter()
            .filter(|&i| assignment[i] == usize::MAX && shadows(sys, &traj, &points[i], tol))
            .collect();
        for i in hits {
            assignment[i] = id;
        }
        debug_assert_eq!(assignment[next], id);
        assignment[next] = id;
    }
    ShadowingNet { centers, assignment }
}

/// Greedy `(n, eps)`-shadowing net over the default point set of `sys`.
pub fn shadowing_net(sys: &SystemHandle, n: u64, epsilon: f64, budget: &SearchBudget) -> Result<(PointSet, ShadowingNet)> {
    let ps = point_set(sys, epsilon, budget)?;
    let net = greedy_net(sys, &ps.points, n, epsilon);
    Ok((ps, net))
}

/// Re-checks every point against its assigned member for times `0..=n`.
pub fn validate_net(sys: &SystemHandle, points: &[Point], net: &ShadowingNet, n: u64, epsilon: f64) -> Result<()> {
    let tol = epsilon + SHADOW_TOLERANCE;
    let trajs: Vec<Vec<Point>> = net.centers.par_iter().map(|&c| sys.orbit(&points[c], n as usize)).collect();
    let bad = (0..points.len())
        .into_par_iter()
        .find_first(|&i| {
            let a = net.assignment[i];
            a >= trajs.len() || !shadows(sys, &trajs[a], &points[i], tol)
        });
    match bad {
        None => Ok(()),
        Some(i) => Err(Error::Structure(format!("point {i} is not shadowed by its net member"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    Bounded,
    Polynomial,
    Exponential,
}

impl GrowthClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthClass::Bounded => "bounded",
            GrowthClass::Polynomial => "polynomial",
            GrowthClass::Exponential => "exponential",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub class: GrowthClass,
    /// Power-law exponent, base-2 rate, or 0 for bounded.
    pub parameter: f64,
    /// RMS residual in `ln r` of the chosen model.
    pub residual: f64,
    pub constant_residual: f64,
    pub power_exponent: f64,
    pub power_residual: f64,
    pub exponential_rate: f64,
    pub exponential_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRecord {
    pub n: u64,
    pub r_estimate: u64,
    pub net_size: u64,
    pub grid: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityCurve {
    pub epsilon: f64,
    pub records: Vec<CurveRecord>,
    pub fit: Option<GrowthFit>,
    pub fit_error: Option<String>,
    pub label: String,
}

/// Geometric `n` grid from 1 to `n_max` with ratio about `sqrt 2`.
pub fn geometric_ns(n_max: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut x = 1.0f64;
    while (x.round() as u64) <= n_max {
        let v = x.round() as u64;
        if out.last() != Some(&v) {
            out.push(v);
        }
        x *= std::f64::consts::SQRT_2;
    }
    if out.last() != Some(&n_max) && n_max > 0 {
        out.push(n_max);
    }
    out
}

/// Greedy net sizes at each `n`; `r_estimate` is the suffix minimum, which is still an
/// upper estimate because the true `r(., eps)` is nondecreasing.
pub fn curve_from_sizes(epsilon: f64, sizes: &[(u64, u64)], grid: &str) -> ComplexityCurve {
    let mut records: Vec<CurveRecord> = sizes
        .iter()
        .map(|&(n, s)| CurveRecord { n, r_estimate: s, net_size: s, grid: grid.to_string() })
        .collect();
    records.sort_by_key(|r| r.n);
    let mut run = u64::MAX;
    for r in records.iter_mut().rev() {
        run = run.min(r.net_size);
        r.r_estimate = run;
    }
    let mut curve = ComplexityCurve {
        epsilon,
        records,
        fit: None,
        fit_error: None,
        label: ESTIMATE_LABEL.into(),
    };
    match classify_growth(&curve) {
        Ok(f) => curve.fit = Some(f),
        Err(e) => curve.fit_error = Some(e.to_string()),
    }
    curve
}

pub fn complexity_curve(sys: &SystemHandle, ns: &[u64], epsilon: f64, budget: &SearchBudget) -> Result<ComplexityCurve> {
    let ps = point_set(sys, epsilon, budget)?;
    let sizes: Vec<(u64, u64)> = ns
        .iter()
        .map(|&n| (n, greedy_net(sys, &ps.points, n, epsilon).len() as u64))
        .collect();
    Ok(curve_from_sizes(epsilon, &sizes, &ps.label))
}

/// Fits constant, power and exponential models to `ln r` and keeps the simplest one
/// within the margin of the best residual.
pub fn classify_growth(curve: &ComplexityCurve) -> Result<GrowthFit> {
    let recs: Vec<&CurveRecord> = curve.records.iter().filter(|r| r.n >= 1).collect();
    if recs.windows(2).any(|w| w[1].r_estimate < w[0].r_estimate) {
        return Err(Error::Structure("complexity curve is not monotone in n".into()));
    }
    if recs.len() < 8 {
        return Err(Error::Precondition(format!("need >= 8 records with n >= 1, got {}", recs.len())));
    }
    let (n0, n1) = (recs[0].n as f64, recs[recs.len() - 1].n as f64);
    if n1 < 10.0 * n0 {
        return Err(Error::Precondition(format!("n range [{n0}, {n1}] spans less than a decade")));
    }
    if recs.iter().any(|r| r.r_estimate == 0) {
        return Err(Error::Precondition("zero counts cannot be fitted".into()));
    }
    let ln_r: Vec<f64> = recs.iter().map(|r| (r.r_estimate as f64).ln()).collect();
    let constant = rms_about_mean(&ln_r);
    let power = linear_fit(&recs.iter().zip(&ln_r).map(|(r, y)| ((r.n as f64).ln(), *y)).collect::<Vec<_>>())
        .ok_or_else(|| Error::Precondition("degenerate n values".into()))?;
    let expo = linear_fit(&recs.iter().zip(&ln_r).map(|(r, y)| (r.n as f64, *y)).collect::<Vec<_>>())
        .ok_or_else(|| Error::Precondition("degenerate n values".into()))?;
    let best = constant.min(power.rms).min(expo.rms);
    let accept = |res: f64| res <= (best * (1.0 + MODEL_MARGIN)).max(best + 1e-9);
    let rate = expo.slope / std::f64::consts::LN_2;
    let (class, parameter, residual) = if accept(constant) {
        (GrowthClass::Bounded, 0.0, constant)
    } else if accept(power.rms) {
        (GrowthClass::Polynomial, power.slope, power.rms)
    } else {
        (GrowthClass::Exponential, rate, expo.rms)
    };
    Ok(GrowthFit {
        class,
        parameter,
        residual,
        constant_residual: constant,
        power_exponent: power.slope,
        power_residual: power.rms,
        exponential_rate: rate,
        exponential_residual: expo.rms,
    })
}

/// Upper bound for a tower of `N` levels at `eps`: the product of level curves
/// measured at `delta = eps - 2^-N` or finer.
pub fn inverse_limit_complexity_bound(level_curves: &[ComplexityCurve], epsilon: f64) -> Result<ComplexityCurve> {
    let levels = level_curves.len();
    if levels == 0 {
        return Err(Error::Precondition("need at least one level curve".into()));
    }
    let tail = 0.5f64.powi(levels as i32);
    if !(epsilon > tail) {
        let mut need = 1;
        while 0.5f64.powi(need) >= epsilon {
            need += 1;
        }
        return Err(Error::Precondition(format!(
            "eps = {epsilon} <= 2^-{levels}; use a truncation of at least N = {need} levels"
        )));
    }
    let delta = epsilon - tail;
    for (i, c) in level_curves.iter().enumerate() {
        if c.epsilon > delta + 1e-12 {
            return Err(Error::Precondition(format!(
                "level {} was measured at eps = {} > delta = {delta}",
                i + 1,
                c.epsilon
            )));
        }
    }
    let ns: Vec<u64> = level_curves[0].records.iter().map(|r| r.n).collect();
    for c in level_curves {
        if c.records.iter().map(|r| r.n).collect::<Vec<_>>() != ns {
            return Err(Error::Structure("level curves use different n grids".into()));
        }
    }
    let sizes: Vec<(u64, u64)> = ns
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let prod = level_curves
                .iter()
                .map(|c| c.records[k].r_estimate)
                .fold(1u64, |a, b| a.saturating_mul(b));
            (n, prod)
        })
        .collect();
    let mut curve = curve_from_sizes(epsilon, &sizes, "product");
    curve.label = format!("upper bound: product of {levels} level estimates at delta = {delta}");
    Ok(curve)
}

/// Open cover given by target sets; `lebesgue_delta` is estimated when absent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cover {
    pub sets: Vec<TargetSet>,
    pub lebesgue_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub n: u64,
    pub estimate: u64,
    pub candidate_cells: usize,
    pub grid: String,
    pub lebesgue_delta: f64,
    pub lebesgue_estimated: bool,
    /// `r(n, delta/2)` estimate, computed when the Lebesgue number was supplied.
    pub shadow_bound: Option<u64>,
    pub label: String,
}

fn depth(sys: &SystemHandle, set: &TargetSet, p: &Point) -> f64 {
    match set {
        TargetSet::Ball { center, radius } => (radius - sys.metric(p, center)).max(0.0),
        TargetSet::Cylinder { word, anchor } => {
            if !set.contains(sys, p) {
                return 0.0;
            }
            let reach = (0..word.len() as i64).map(|i| (anchor + i).abs()).max().unwrap_or(0);
            0.5f64.powi(reach as i32)
        }
    }
}

/// Default cell count per dimension for cover computations.
pub const COVER_GRID: usize = 64;

/// Greedy set cover of the point set by cells of the join of `T^-i U`, `i = 0..=n`.
pub fn cover_complexity(sys: &SystemHandle, cover: &Cover, n: u64, budget: &SearchBudget) -> Result<CoverReport> {
    if cover.sets.is_empty() || cover.sets.len() > 64 {
        return Err(Error::Precondition("a cover needs between 1 and 64 sets".into()));
    }
    budget.validate()?;
    let ps = if sys.grid_dims() > 0 && budget.grid_resolution.is_empty() {
        let b = SearchBudget { grid_resolution: vec![COVER_GRID], ..budget.clone() };
        point_set(sys, 4.0 / COVER_GRID as f64, &b)?
    } else {
        let eps = budget.grid_resolution.iter().map(|&r| 4.0 / r as f64).fold(f64::INFINITY, f64::min);
        point_set(sys, if eps.is_finite() { eps } else { 1.0 }, budget)?
    };
    let pts = &ps.points;
    let k = cover.sets.len();

    // memberships[p][i]: sets containing T^i p; deepest[p][i]: the set where T^i p is deepest
    let rows: Vec<Result<(Vec<u64>, Vec<u8>, f64)>> = pts
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut mem = Vec::with_capacity(n as usize + 1);
            let mut deep = Vec::with_capacity(n as usize + 1);
            let mut q = p.clone();
            let mut leb = f64::INFINITY;
            for i in 0..=n {
                if i > 0 {
                    q = sys.step(&q);
                }
                let depths: Vec<f64> = cover.sets.iter().map(|s| depth(sys, s, &q)).collect();
                let m = (0..k).filter(|&c| cover.sets[c].contains(sys, &q)).fold(0u64, |m, c| m | 1 << c);
                if m == 0 {
                    return Err(Error::Precondition(format!("cover misses grid point {idx} at time {i}")));
                }
                let best = (0..k)
                    .filter(|&c| m >> c & 1 == 1)
                    .max_by(|&a, &b| depths[a].total_cmp(&depths[b]).then(b.cmp(&a)))
                    .unwrap();
                if i == 0 {
                    leb = depths.iter().cloned().fold(0.0, f64::max);
                }
                mem.push(m);
                deep.push(best as u8);
            }
            Ok((mem, deep, leb))
        })
        .collect();
    let rows: Vec<(Vec<u64>, Vec<u8>, f64)> = rows.into_iter().collect::<Result<_>>()?;

    let mut cells: Vec<Vec<u8>> = rows.iter().map(|r| r.1.clone()).collect();
    cells.sort();
    cells.dedup();
    if cells.len() > budget.max_points {
        return Err(Error::Budget(format!(
            "{} join cells exceed the budget {}",
            cells.len(),
            budget.max_points
        )));
    }
    let words = pts.len().div_ceil(64);
    let coverage: Vec<Vec<u64>> = cells
        .par_iter()
        .map(|cell| {
            let mut bits = vec![0u64; words];
            for (p, row) in rows.iter().enumerate() {
                if row.0.iter().zip(cell).all(|(m, &c)| m >> c & 1 == 1) {
                    bits[p / 64] |= 1 << (p % 64);
                }
            }
            bits
        })
        .collect();
    let mut uncovered = vec![u64::MAX; words];
    if pts.len() % 64 != 0 {
        uncovered[words - 1] = (1u64 << (pts.len() % 64)) - 1;
    }
    let mut remaining = pts.len();
    let mut chosen = 0u64;
    while remaining > 0 {
        let (gain, best) = coverage
            .par_iter()
            .enumerate()
            .map(|(i, bits)| {
                let g: u32 = bits.iter().zip(&uncovered).map(|(a, b)| (a & b).count_ones()).sum();
                (g, std::cmp::Reverse(i))
            })
            .max()
            .unwrap();
        if gain == 0 {
            return Err(Error::Structure("join cells fail to cover the grid".into()));
        }
        for (u, b) in uncovered.iter_mut().zip(&coverage[best.0]) {
            *u &= !b;
        }
        remaining -= gain as usize;
        chosen += 1;
    }

    let (delta, estimated) = match cover.lebesgue_delta {
        Some(d) => (d, false),
        None => (rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min), true),
    };
    let shadow_bound = match (cover.lebesgue_delta, delta > 0.0) {
        (Some(_), true) => {
            let (_, net) = shadowing_net(sys, n, delta / 2.0, budget)?;
            Some(net.len() as u64)
        }
        _ => None,
    };
    Ok(CoverReport {
        n,
        estimate: chosen,
        candidate_cells: cells.len(),
        grid: ps.label,
        lebesgue_delta: delta,
        lebesgue_estimated: estimated,
        shadow_bound,
        label: ESTIMATE_LABEL.into(),
    })
}

/// Slope of `ln N(eps)` against `ln(1/eps)` with `N(eps)` the greedy `(0, eps)`-net size.
pub fn box_dimension_estimate(sys: &SystemHandle, epsilons: &[f64], budget: &SearchBudget) -> Result<(f64, Vec<(f64, u64)>)> {
    let mut counts = Vec::new();
    for &e in epsilons {
        let (_, net) = shadowing_net(sys, 0, e, budget)?;
        counts.push((e, net.len() as u64));
    }
    let pts: Vec<(f64, f64)> = counts.iter().map(|&(e, c)| ((1.0 / e).ln(), (c as f64).ln())).collect();
    let fit = linear_fit(&pts).ok_or_else(|| Error::Precondition("need two distinct epsilons".into()))?;
    Ok((fit.slope, counts))
}
