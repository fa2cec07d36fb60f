//! Birkhoff averages along single orbits.
//!
//! `A_N = (1/N) sum_{n<N} f(T^n x)`, sampled on an increasing `N` grid in one
//! streaming pass. Oscillation is `max |A_{N1} - A_{N2}|` over grid points in
//! the tail window `N >= N_max / TAIL_DIVISOR`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::systems::{Point, SystemHandle};

pub const TAIL_DIVISOR: u64 = 10;

/// Real-valued observable on points.
#[derive(Clone)]
pub enum Observable {
    /// Coordinate `i`.
    Coord(usize),
    /// `cos(2 pi freq t_i)`.
    Cos { coord: usize, freq: f64 },
    /// `sin(2 pi freq t_i)`.
    Sin { coord: usize, freq: f64 },
    /// `sin^2(pi t_2) cos(2 pi t_3)` on Heisenberg coordinates; continuous on the quotient.
    NilFiber,
    Constant(f64),
    /// Symbol at a window position, as a real number.
    SymbolAt(i64),
    Custom { id: String, f: Arc<dyn Fn(&Point) -> f64 + Send + Sync> },
}

impl Observable {
    pub fn id(&self) -> String {
        match self {
            Observable::Coord(i) => format!("coord{i}"),
            Observable::Cos { coord, freq } => format!("cos(2pi*{freq}*t{coord})"),
            Observable::Sin { coord, freq } => format!("sin(2pi*{freq}*t{coord})"),
            Observable::NilFiber => "sin^2(pi*t1)*cos(2pi*t2)".into(),
            Observable::Constant(c) => format!("const({c})"),
            Observable::SymbolAt(k) => format!("symbol[{k}]"),
            Observable::Custom { id, .. } => id.clone(),
        }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        let coord = |i: usize| -> f64 {
            match p {
                Point::Thread(t) => t.levels[0].coords().and_then(|c| c.get(i).copied()),
                _ => p.coords().and_then(|c| c.get(i).copied()),
            }
            .unwrap_or(f64::NAN)
        };
        match self {
            Observable::Coord(i) => coord(*i),
            Observable::Cos { coord: i, freq } => (TAU * freq * coord(*i)).cos(),
            Observable::Sin { coord: i, freq } => (TAU * freq * coord(*i)).sin(),
            Observable::NilFiber => (PI * coord(1)).sin().powi(2) * (TAU * coord(2)).cos(),
            Observable::Constant(c) => *c,
            Observable::SymbolAt(k) => p
                .as_window()
                .and_then(|w| w.symbol_at(*k))
                .map_or(f64::NAN, f64::from),
            Observable::Custom { f, .. } => f(p),
        }
    }

    /// Parses `coord:i`, `cos:i[:freq]`, `sin:i[:freq]`, `nilfiber`, `const:c`, `symbol:k`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |x: &str| -> Result<i64> {
            x.parse().map_err(|_| Error::Parse(format!("bad integer '{x}' in observable '{s}'")))
        };
        let real = |x: &str| -> Result<f64> {
            x.parse().map_err(|_| Error::Parse(format!("bad number '{x}' in observable '{s}'")))
        };
        let idx = |x: &str| -> Result<usize> {
            let v = int(x)?;
            usize::try_from(v).map_err(|_| Error::Parse(format!("negative coordinate in '{s}'")))
        };
        Ok(match parts.as_slice() {
            ["coord", i] => Observable::Coord(idx(i)?),
            ["cos", i] => Observable::Cos { coord: idx(i)?, freq: 1.0 },
            ["cos", i, f] => Observable::Cos { coord: idx(i)?, freq: real(f)? },
            ["sin", i] => Observable::Sin { coord: idx(i)?, freq: 1.0 },
            ["sin", i, f] => Observable::Sin { coord: idx(i)?, freq: real(f)? },
            ["nilfiber"] => Observable::NilFiber,
            ["const", c] => Observable::Constant(real(c)?),
            ["symbol", k] => Observable::SymbolAt(int(k)?),
            _ => return Err(Error::Parse(format!("unknown observable '{s}'"))),
        })
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AverageTrace {
    pub observable: String,
    pub start: String,
    /// `(N, A_N)` for each grid point.
    pub averages: Vec<(u64, f64)>,
    pub tail_from: u64,
    pub oscillation: f64,
}

impl AverageTrace {
    pub fn last(&self) -> f64 {
        self.averages.last().map_or(f64::NAN, |a| a.1)
    }

    /// Oscillation of the prefix ending at `n_max`, with its own tail window.
    pub fn oscillation_at(&self, n_max: u64) -> f64 {
        tail_oscillation(&self.averages, n_max)
    }
}

fn tail_oscillation(avg: &[(u64, f64)], n_max: u64) -> f64 {
    let from = n_max / TAIL_DIVISOR;
    let tail: Vec<f64> = avg.iter().filter(|(n, _)| *n >= from && *n <= n_max).map(|a| a.1).collect();
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if tail.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Powers of two up to `n_max`, then `n_max` itself.
pub fn power_grid(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..64).map(|k| 1u64 << k).take_while(|&n| n <= n_max).collect();
    if n_max > 0 && out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

pub fn birkhoff(sys: &SystemHandle, f: &Observable, x: &Point, n_grid: &[u64]) -> Result<AverageTrace> {
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("N grid must be positive and strictly increasing".into()));
    }
    let mut averages = Vec::with_capacity(n_grid.len());
    let mut sum = 0.0;
    let mut p = x.clone();
    let mut n = 0u64;
    for &target in n_grid {
        while n < target {
            if n > 0 {
                p = sys.step(&p);
            }
            sum += f.eval(&p);
            n += 1;
        }
        averages.push((n, sum / n as f64));
    }
    let n_max = *n_grid.last().unwrap();
    Ok(AverageTrace {
        observable: f.id(),
        start: x.render(),
        oscillation: tail_oscillation(&averages, n_max),
        tail_from: n_max / TAIL_DIVISOR,
        averages,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableSpread {
    pub observable: String,
    pub tail_averages: Vec<f64>,
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub n_max: u64,
    pub eta: f64,
    pub starts: Vec<String>,
    pub rows: Vec<ObservableSpread>,
    pub max_spread: f64,
    pub verdict: String,
}

/// Spread across starts of `A_{N_max}` for each observable; a verdict at resolution `eta`.
pub fn unique_ergodicity_probe(
    sys: &SystemHandle,
    observables: &[Observable],
    starts: &[Point],
    n_max: u64,
    eta: f64,
) -> Result<ProbeReport> {
    if observables.len() < 3 || starts.len() < 3 {
        return Err(Error::Precondition("need at least 3 observables and 3 starts".into()));
    }
    let grid = power_grid(n_max);
    let pairs: Vec<(usize, usize)> = (0..observables.len())
        .flat_map(|o| (0..starts.len()).map(move |s| (o, s)))
        .collect();
    let lasts: Vec<f64> = pairs
        .par_iter()
        .map(|&(o, s)| birkhoff(sys, &observables[o], &starts[s], &grid).map(|t| t.last()))
        .collect::<Result<_>>()?;
    let rows: Vec<ObservableSpread> = observables
        .iter()
        .enumerate()
        .map(|(o, obs)| {
            let tail: Vec<f64> = lasts[o * starts.len()..(o + 1) * starts.len()].to_vec();
            let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
            ObservableSpread { observable: obs.id(), tail_averages: tail, spread: hi - lo }
        })
        .collect();
    let max_spread = rows.iter().map(|r| r.spread).fold(0.0, f64::max);
    let verdict = if max_spread <= eta {
        format!("consistent with unique ergodicity at resolution {eta}")
    } else {
        "start-dependent averages detected".to_string()
    };
    Ok(ProbeReport {
        n_max,
        eta,
        starts: starts.iter().map(Point::render).collect(),
        rows,
        max_spread,
        verdict,
    })
}

/// Bound `|A_N| <= (1 + |sin pi alpha|) / (2 N |sin pi alpha|)` for `cos 2 pi theta` from `theta = 0`.
pub fn rotation_cos_bound(alpha: f64, n: u64) -> f64 {
    let s = (PI * alpha).sin().abs();
    (1.0 + s) / (2.0 * n as f64 * s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContrastReport {
    pub n_max: u64,
    pub subject: Vec<AverageTrace>,
    pub baseline: Vec<AverageTrace>,
    pub subject_oscillation: f64,
    pub baseline_oscillation: f64,
    pub ratio: f64,
    pub label: String,
}

/// Largest tail oscillation across starts, subject against baseline.
pub fn oscillation_contrast(
    subject: (&SystemHandle, &Observable, &[Point]),
    baseline: (&SystemHandle, &Observable, &[Point]),
    n_max: u64,
) -> Result<ContrastReport> {
    let grid = power_grid(n_max);
    let run = |(sys, f, starts): (&SystemHandle, &Observable, &[Point])| -> Result<Vec<AverageTrace>> {
        starts.par_iter().map(|x| birkhoff(sys, f, x, &grid)).collect()
    };
    let (s, b) = rayon::join(|| run(subject), || run(baseline));
    let (s, b) = (s?, b?);
    let max_osc = |t: &[AverageTrace]| t.iter().map(|t| t.oscillation).fold(0.0, f64::max);
    let (so, bo) = (max_osc(&s), max_osc(&b));
    Ok(ContrastReport {
        n_max,
        subject_oscillation: so,
        baseline_oscillation: bo,
        ratio: so / bo,
        subject: s,
        baseline: b,
        label: "experiment: finite-truncation contrast, not a convergence proof".into(),
    })
}
