//! Dynamical parallelepipeds, face moves, regional-proximality witness search
//! and the cube criterion.
//!
//! A cube of dimension `d` stores its `2^d` vertices in a `Vec` indexed by the
//! bitmask of `eps`: bit `j - 1` is set when `j` belongs to `eps`. Witness
//! searches are finite and seeded; a miss only means the budget ran out.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::SearchBudget;
use crate::error::{Error, Result};
use crate::systems::{Point, SystemHandle};

/// Largest cube dimension accepted by [`cube_criterion`].
pub const MAX_CRITERION_DIM: usize = 3;
/// Largest cube dimension accepted anywhere (vertex indices are `u32` masks).
pub const MAX_CUBE_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cube {
    pub dim: usize,
    pub points: Vec<Point>,
}

impl Cube {
    pub fn vertex(&self, eps: usize) -> &Point {
        &self.points[eps]
    }
}

/// `T_j^{exponent}` acting on the vertices whose `eps` contains `j` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FaceMove {
    pub d: usize,
    pub j: usize,
    pub exponent: i64,
}

impl FaceMove {
    pub fn new(d: usize, j: usize, exponent: i64) -> Result<Self> {
        if j == 0 || j > d {
            return Err(Error::Structure(format!("face index {j} outside 1..={d}")));
        }
        Ok(FaceMove { d, j, exponent })
    }
}

/// `n . eps` for the vertex mask `eps`.
pub fn dot(n: &[i64], eps: usize) -> i64 {
    n.iter()
        .enumerate()
        .filter(|(i, _)| eps >> i & 1 == 1)
        .map(|(_, v)| *v)
        .sum()
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_CUBE_DIM {
        return Err(Error::Structure(format!("cube dimension {d} outside 1..={MAX_CUBE_DIM}")));
    }
    Ok(())
}

/// `(T^{n . eps} x)_{eps in {0,1}^d}`.
pub fn sample_cube(sys: &SystemHandle, x: &Point, n: &[i64]) -> Result<Cube> {
    check_dim(n.len())?;
    let d = n.len();
    Ok(Cube {
        dim: d,
        points: (0..1usize << d).map(|e| sys.step_n(x, dot(n, e))).collect(),
    })
}

pub fn apply_face(sys: &SystemHandle, c: &Cube, mv: FaceMove) -> Result<Cube> {
    if mv.d != c.dim {
        return Err(Error::Structure(format!(
            "face move for dimension {} applied to a cube of dimension {}",
            mv.d, c.dim
        )));
    }
    FaceMove::new(mv.d, mv.j, mv.exponent)?;
    let bit = 1usize << (mv.j - 1);
    Ok(Cube {
        dim: c.dim,
        points: c
            .points
            .iter()
            .enumerate()
            .map(|(e, p)| {
                if e & bit != 0 {
                    sys.step_n(p, mv.exponent)
                } else {
                    p.clone()
                }
            })
            .collect(),
    })
}

/// Integer vectors of `[-N, N]^d` ordered by sup norm, then `l1` norm, then lexicographically,
/// where `N` is the largest radius with `(2N + 1)^d <= max_values`.
pub fn spiral(d: usize, max_values: usize) -> Vec<Vec<i64>> {
    let mut radius = 0i64;
    while ((2 * radius + 3) as f64).powi(d as i32) <= max_values as f64 {
        radius += 1;
    }
    let side = (2 * radius + 1) as usize;
    let total = side.pow(d as u32);
    let mut out: Vec<Vec<i64>> = (0..total)
        .map(|mut code| {
            let mut v = vec![0i64; d];
            for c in v.iter_mut().rev() {
                *c = (code % side) as i64 - radius;
                code /= side;
            }
            v
        })
        .collect();
    out.sort_by_key(|v| {
        let sup = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        let l1: i64 = v.iter().map(|x| x.abs()).sum();
        (sup, l1, v.clone())
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// `T^k` of the anchor point.
    Orbit(i64),
    /// The `i`-th accepted sampler draw.
    Sample(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RPWitness {
    pub x_prime: Point,
    pub y_prime: Point,
    pub x_origin: Origin,
    pub y_origin: Origin,
    pub n: Vec<i64>,
    pub achieved_delta: f64,
}

impl RPWitness {
    /// The same points and the first `d` entries of `n`, as a lower-order witness.
    pub fn restrict(&self, d: usize) -> RPWitness {
        RPWitness {
            n: self.n[..d.min(self.n.len())].to_vec(),
            ..self.clone()
        }
    }
}

/// `max(rho(x, x'), rho(y, y'), max_{eps != 0} rho(T^{n.eps} x', T^{n.eps} y'))`.
pub fn witness_delta(sys: &SystemHandle, x: &Point, y: &Point, w: &RPWitness) -> f64 {
    let d = w.n.len();
    let mut worst = sys.metric(x, &w.x_prime).max(sys.metric(y, &w.y_prime));
    for e in 1..1usize << d {
        let k = dot(&w.n, e);
        worst = worst.max(sys.metric(&sys.step_n(&w.x_prime, k), &sys.step_n(&w.y_prime, k)));
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchStats {
    pub candidates_x: usize,
    pub candidates_y: usize,
    pub n_values: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RpOutcome {
    Found {
        witness: RPWitness,
        stats: SearchStats,
    },
    /// Nothing found within the budget; says nothing about membership.
    NotFound {
        label: String,
        stats: SearchStats,
    },
}

impl RpOutcome {
    pub fn witness(&self) -> Option<&RPWitness> {
        match self {
            RpOutcome::Found { witness, .. } => Some(witness),
            RpOutcome::NotFound { .. } => None,
        }
    }
}

/// Points within `delta` of `p`: orbit points `T^k p`, `0 <= k < max_candidates`,
/// then accepted draws among `max_candidates` sampler calls.
fn candidates(
    sys: &SystemHandle,
    p: &Point,
    delta: f64,
    budget: &SearchBudget,
    stream: u64,
) -> Vec<(Point, Origin)> {
    let mut out = Vec::new();
    let mut q = p.clone();
    for k in 0..budget.max_candidates {
        if sys.metric(p, &q) < delta {
            out.push((q.clone(), Origin::Orbit(k as i64)));
        }
        q = sys.step(&q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(stream);
    let mut accepted = 0;
    for _ in 0..budget.max_candidates {
        let s = sys.sample(&mut rng);
        if sys.metric(p, &s) < delta {
            out.push((s, Origin::Sample(accepted)));
            accepted += 1;
        }
    }
    out
}

/// `T^k p` for `k` in `lo..=hi` (`lo <= 0 <= hi`), index `k - lo`.
fn orbit_table(sys: &SystemHandle, p: &Point, lo: i64, hi: i64) -> Vec<Point> {
    let mut back = Vec::with_capacity((-lo) as usize);
    let mut q = p.clone();
    for _ in lo..0 {
        q = sys.inverse_step(&q);
        back.push(q.clone());
    }
    back.reverse();
    let mut out = back;
    let mut q = p.clone();
    out.push(q.clone());
    for _ in 0..hi {
        q = sys.step(&q);
        out.push(q.clone());
    }
    out
}

const BLOCK: usize = 256;

/// Budgeted search for `x', y', n` with `rho(x,x'), rho(y,y') < delta` and
/// `rho(T^{n.eps} x', T^{n.eps} y') < delta` for every nonempty `eps`.
///
/// Among all hits the one with the smallest `(spiral index of n, x' index, y' index)` is
/// returned, so the output does not depend on the thread count.
pub fn rp_test(
    sys: &SystemHandle,
    x: &Point,
    y: &Point,
    d: usize,
    delta: f64,
    budget: &SearchBudget,
) -> Result<RpOutcome> {
    if d == 0 {
        return Err(Error::Precondition("cube dimension d must be >= 1".into()));
    }
    check_dim(d)?;
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    budget.validate()?;
    let ns = spiral(d, budget.max_n_values);
    if sys.metric(x, y) == 0.0 {
        let witness = RPWitness {
            x_prime: x.clone(),
            y_prime: y.clone(),
            x_origin: Origin::Orbit(0),
            y_origin: Origin::Orbit(0),
            n: vec![0; d],
            achieved_delta: 0.0,
        };
        let stats = SearchStats { candidates_x: 1, candidates_y: 1, n_values: 1 };
        return Ok(RpOutcome::Found { witness, stats });
    }
    let cx = candidates(sys, x, delta, budget, 1);
    let cy = candidates(sys, y, delta, budget, 2);
    let masks: Vec<usize> = (1..1usize << d).collect();
    let radius = ns.last().map(|v| v[0].abs()).unwrap_or(0);
    let mut tried = 0usize;

    let hit = if d == 1 {
        // stream both orbits block by block; n = 0, -1, 1, -2, 2, ...
        let mut fx: Vec<(Point, Point)> = cx.iter().map(|(p, _)| (p.clone(), p.clone())).collect();
        let mut fy: Vec<(Point, Point)> = cy.iter().map(|(p, _)| (p.clone(), p.clone())).collect();
        let mut found = None;
        let mut start = 0usize;
        while start < ns.len() && found.is_none() {
            let end = (start + BLOCK).min(ns.len());
            let advance = |fronts: &mut Vec<(Point, Point)>| -> Vec<Vec<Point>> {
                fronts
                    .par_iter_mut()
                    .map(|(back, fwd)| {
                        (start..end)
                            .map(|idx| {
                                if idx == 0 {
                                    fwd.clone()
                                } else if idx % 2 == 1 {
                                    *back = sys.inverse_step(back);
                                    back.clone()
                                } else {
                                    *fwd = sys.step(fwd);
                                    fwd.clone()
                                }
                            })
                            .collect()
                    })
                    .collect()
            };
            let tx = advance(&mut fx);
            let ty = advance(&mut fy);
            found = (0..cx.len() * cy.len())
                .into_par_iter()
                .filter_map(|pair| {
                    let (i, j) = (pair / cy.len(), pair % cy.len());
                    (0..end - start)
                        .find(|&k| sys.metric(&tx[i][k], &ty[j][k]) < delta)
                        .map(|k| (start + k, i, j))
                })
                .min();
            tried = end;
            start = end;
        }
        found
    } else {
        let span = d as i64 * radius;
        let tx: Vec<Vec<Point>> = cx.par_iter().map(|(p, _)| orbit_table(sys, p, -span, span)).collect();
        let ty: Vec<Vec<Point>> = cy.par_iter().map(|(p, _)| orbit_table(sys, p, -span, span)).collect();
        let mut found = None;
        let mut start = 0usize;
        while start < ns.len() && found.is_none() {
            let end = (start + BLOCK).min(ns.len());
            found = (0..cx.len() * cy.len())
                .into_par_iter()
                .filter_map(|pair| {
                    let (i, j) = (pair / cy.len(), pair % cy.len());
                    (start..end)
                        .find(|&s| {
                            masks.iter().all(|&e| {
                                let k = (dot(&ns[s], e) + span) as usize;
                                sys.metric(&tx[i][k], &ty[j][k]) < delta
                            })
                        })
                        .map(|s| (s, i, j))
                })
                .min();
            tried = end;
            start = end;
        }
        found
    };

    let stats = SearchStats { candidates_x: cx.len(), candidates_y: cy.len(), n_values: tried };
    match hit {
        None => Ok(RpOutcome::NotFound { label: "budget-exhausted".into(), stats }),
        Some((s, i, j)) => {
            let mut witness = RPWitness {
                x_prime: cx[i].0.clone(),
                y_prime: cy[j].0.clone(),
                x_origin: cx[i].1,
                y_origin: cy[j].1,
                n: ns[s].clone(),
                achieved_delta: 0.0,
            };
            witness.achieved_delta = witness_delta(sys, x, y, &witness);
            if !(witness.achieved_delta < delta) {
                return Err(Error::Structure(format!(
                    "witness failed re-validation: achieved {} >= delta {delta}",
                    witness.achieved_delta
                )));
            }
            Ok(RpOutcome::Found { witness, stats })
        }
    }
}

/// How one pattern `s: {0,1}^d -> {1,2}` was realized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternResult {
    /// Bit `eps` set means vertex `eps` must be near `x2`.
    pub pattern: u32,
    /// Vertex targets, `1` or `2`, in `eps` order.
    pub targets: Vec<u8>,
    pub realized: bool,
    pub base_point: Option<Point>,
    pub base_origin: Option<Origin>,
    pub n: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeCriterionReport {
    pub d: usize,
    pub delta: f64,
    pub patterns: Vec<PatternResult>,
    pub base_points: usize,
    pub n_values: usize,
    pub verdict: String,
}

impl CubeCriterionReport {
    pub fn all_realized(&self) -> bool {
        self.patterns.iter().all(|p| p.realized)
    }

    pub fn failures(&self) -> Vec<u32> {
        self.patterns.iter().filter(|p| !p.realized).map(|p| p.pattern).collect()
    }
}

/// Searches base points `z` and vectors `n` with `rho(T^{n.eps} z, x_{s(eps)}) < delta`
/// for all `eps`, for every pattern `s`.
///
/// Base points are orbit points of `x1` and `x2` plus `max_candidates` sampler draws.
pub fn cube_criterion(
    sys: &SystemHandle,
    x1: &Point,
    x2: &Point,
    d: usize,
    delta: f64,
    budget: &SearchBudget,
) -> Result<CubeCriterionReport> {
    if d == 0 {
        return Err(Error::Precondition("cube dimension d must be >= 1".into()));
    }
    if d > MAX_CRITERION_DIM {
        return Err(Error::Budget(format!(
            "d = {d} needs 2^(2^{d}) patterns; at most d = {MAX_CRITERION_DIM} is supported"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    budget.validate()?;
    let verts = 1usize << d;
    let n_patterns = 1usize << verts;
    let ns = spiral(d, budget.max_n_values);
    let radius = ns.last().map(|v| v[0].abs()).unwrap_or(0);
    let span = d as i64 * radius;

    let mut bases: Vec<(Point, Origin)> = Vec::new();
    let orbit_len = budget.max_candidates.min(64);
    for anchor in [x1, x2] {
        let mut q = anchor.clone();
        for k in 0..orbit_len {
            bases.push((q.clone(), Origin::Orbit(k as i64)));
            q = sys.step(&q);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(3);
    for i in 0..budget.max_candidates {
        bases.push((sys.sample(&mut rng), Origin::Sample(i)));
    }

    // per base point: best spiral index for each pattern
    let per_base: Vec<Vec<usize>> = bases
        .par_iter()
        .map(|(z, _)| {
            let table = orbit_table(sys, z, -span, span);
            let near1: Vec<bool> = table.iter().map(|p| sys.metric(p, x1) < delta).collect();
            let near2: Vec<bool> = table.iter().map(|p| sys.metric(p, x2) < delta).collect();
            let mut best = vec![usize::MAX; n_patterns];
            let mut remaining = n_patterns;
            for (s, n) in ns.iter().enumerate() {
                // pattern bits allowed at each vertex
                let mut consistent: Vec<usize> = vec![0];
                for e in 0..verts {
                    let k = (dot(n, e) + span) as usize;
                    let (a, b) = (near1[k], near2[k]);
                    if !a && !b {
                        consistent.clear();
                        break;
                    }
                    if a && b {
                        let with: Vec<usize> = consistent.iter().map(|m| m | 1 << e).collect();
                        consistent.extend(with);
                    } else if b {
                        for m in consistent.iter_mut() {
                            *m |= 1 << e;
                        }
                    }
                }
                for m in consistent {
                    if best[m] == usize::MAX {
                        best[m] = s;
                        remaining -= 1;
                    }
                }
                if remaining == 0 {
                    break;
                }
            }
            best
        })
        .collect();

    let patterns = (0..n_patterns)
        .map(|m| {
            let hit = per_base
                .iter()
                .enumerate()
                .filter(|(_, b)| b[m] != usize::MAX)
                .map(|(zi, b)| (b[m], zi))
                .min();
            PatternResult {
                pattern: m as u32,
                targets: (0..verts).map(|e| 1 + (m >> e & 1) as u8).collect(),
                realized: hit.is_some(),
                base_point: hit.map(|(_, zi)| bases[zi].0.clone()),
                base_origin: hit.map(|(_, zi)| bases[zi].1),
                n: hit.map(|(s, _)| ns[s].clone()),
            }
        })
        .collect::<Vec<_>>();
    let failures = patterns.iter().filter(|p| !p.realized).count();
    let verdict = if failures == 0 {
        "all patterns realized".to_string()
    } else {
        format!("{failures} of {n_patterns} patterns not realized (budget-exhausted)")
    };
    Ok(CubeCriterionReport {
        d,
        delta,
        patterns,
        base_points: bases.len(),
        n_values: ns.len(),
        verdict,
    })
}

/// Re-checks a realized pattern against the raw definition; returns the worst vertex distance.
pub fn pattern_delta(sys: &SystemHandle, x1: &Point, x2: &Point, r: &PatternResult) -> Option<f64> {
    let (z, n) = (r.base_point.as_ref()?, r.n.as_ref()?);
    Some(
        r.targets
            .iter()
            .enumerate()
            .map(|(e, t)| {
                let target = if *t == 1 { x1 } else { x2 };
                sys.metric(&sys.step_n(z, dot(n, e)), target)
            })
            .fold(0.0, f64::max),
    )
}
