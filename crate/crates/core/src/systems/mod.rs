//! Topological dynamical systems `(X, T, rho)` behind a single handle type.
//!
//! Every concrete system works on [`Point`] values and exposes its forward
//! and backward map, its metric and a seeded sampler. Metric systems also
//! provide a uniform grid in their coordinate chart; symbolic systems
//! enumerate their windows exactly.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nilmetric::QuotientPoint;

pub mod furstenberg;
pub mod nil;
pub mod rotation;
pub mod skew;
pub mod symbolic;
pub mod tower;

pub use furstenberg::{make_furstenberg, FurstenbergRecipe, FurstenbergSystem};
pub use nil::{make_nilsystem, NilSystem};
pub use rotation::{make_rotation, Rotation};
pub use skew::{make_skew_product, SkewProduct};
pub use symbolic::{
    make_fullshift, make_sturmian, sturmian_code, FullShift, SturmianSystem, SymbolicLanguage,
    WordSet,
};
pub use tower::{make_inverse_limit, FactorMap, InverseLimit};

/// `(sqrt 5 - 1) / 2`.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;
/// `sqrt 2 - 1`.
pub const SILVER: f64 = 0.414_213_562_373_095_1;

/// Fractional part in `[0, 1)`.
pub fn wrap01(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Wrap-around distance between two angles measured in turns.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    let d = d - d.floor();
    d.min(1.0 - d)
}

/// Max over coordinates of the wrap-around distance.
pub fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max(circle_dist(*x, *y)))
}

/// Best rational approximation `p/q` with `q <= max_den` if it is within `tol`.
pub fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2, k2));
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac.abs() < 1e-300 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// `Some((p, q))` when `x` is a fraction with denominator at most `10^6` up to rounding.
pub fn detect_rational(x: f64) -> Option<(i64, i64)> {
    rational_approx(x, 1_000_000, 1e-15)
}

/// Parses `golden`, `silver` or a decimal number.
pub fn parse_real(s: &str) -> Result<f64> {
    match s.trim() {
        "golden" => Ok(GOLDEN),
        "silver" => Ok(SILVER),
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("not a number: {t:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusPoint {
    pub coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|x| !(0.0..1.0).contains(x)) {
            return Err(Error::Precondition(format!(
                "torus coordinates must lie in [0,1): {coords:?}"
            )));
        }
        Ok(TorusPoint { coords })
    }

    /// Reduces arbitrary reals mod 1.
    pub fn wrapped(coords: &[f64]) -> Self {
        TorusPoint {
            coords: coords.iter().map(|&x| wrap01(x)).collect(),
        }
    }
}

/// Where a symbolic window came from when it codes a rotation orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub alpha: f64,
    pub z: f64,
}

/// Centered word `w_{-L} .. w_L` over `{0..k-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolicWindow {
    pub alphabet: u8,
    pub half_len: usize,
    pub symbols: Vec<u8>,
    pub provenance: Option<Provenance>,
}

impl SymbolicWindow {
    pub fn new(alphabet: u8, symbols: Vec<u8>) -> Result<Self> {
        if symbols.len() % 2 == 0 {
            return Err(Error::Precondition("window length must be odd".into()));
        }
        if let Some(s) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::Precondition(format!(
                "symbol {s} outside alphabet of size {alphabet}"
            )));
        }
        Ok(SymbolicWindow {
            alphabet,
            half_len: symbols.len() / 2,
            symbols,
            provenance: None,
        })
    }

    pub fn constant(alphabet: u8, symbol: u8, half_len: usize) -> Result<Self> {
        Self::new(alphabet, vec![symbol; 2 * half_len + 1])
    }

    /// Symbol at position `pos` relative to the center.
    pub fn symbol_at(&self, pos: i64) -> Option<u8> {
        let idx = pos + self.half_len as i64;
        if idx < 0 || idx as usize >= self.symbols.len() {
            None
        } else {
            Some(self.symbols[idx as usize])
        }
    }

    /// `2^{-min{|n| : x_n != y_n}}` over the common window, 0 if they agree there.
    pub fn metric(&self, other: &SymbolicWindow) -> f64 {
        let l = self.half_len.min(other.half_len) as i64;
        for n in 0..=l {
            let differs = |p: i64| self.symbol_at(p) != other.symbol_at(p);
            if differs(n) || differs(-n) {
                return 0.5f64.powi(n as i32);
            }
        }
        0.0
    }

    pub fn word(&self) -> String {
        self.symbols.iter().map(|s| char::from(b'0' + *s)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseLimitPoint {
    pub levels: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Point {
    Torus(TorusPoint),
    Quotient(QuotientPoint),
    Symbolic(SymbolicWindow),
    Thread(InverseLimitPoint),
}

impl Point {
    pub fn torus(coords: &[f64]) -> Point {
        Point::Torus(TorusPoint::wrapped(coords))
    }

    /// Real coordinates for torus and quotient points.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Torus(t) => Some(&t.coords),
            Point::Quotient(q) => Some(q.coords()),
            _ => None,
        }
    }

    pub fn as_window(&self) -> Option<&SymbolicWindow> {
        match self {
            Point::Symbolic(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_thread(&self) -> Option<&InverseLimitPoint> {
        match self {
            Point::Thread(t) => Some(t),
            _ => None,
        }
    }

    /// Short text form used in CSV output.
    pub fn render(&self) -> String {
        match self {
            Point::Torus(_) | Point::Quotient(_) => self
                .coords()
                .unwrap()
                .iter()
                .map(|x| format!("{x:.17}"))
                .collect::<Vec<_>>()
                .join(";"),
            Point::Symbolic(w) => w.word(),
            Point::Thread(t) => t
                .levels
                .iter()
                .map(|p| p.render())
                .collect::<Vec<_>>()
                .join("|"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    TorusVector,
    QuotientPoint,
    SymbolicWindow,
    Product,
}

/// A compact metric space with a homeomorphism, in computable form.
pub trait DynamicalSystem: Send + Sync {
    fn name(&self) -> String;

    fn point_kind(&self) -> PointKind;

    fn step(&self, p: &Point) -> Point;

    fn inverse_step(&self, p: &Point) -> Point;

    /// `T^n p` for any signed `n`.
    fn step_n(&self, p: &Point, n: i64) -> Point {
        let mut q = p.clone();
        if n >= 0 {
            for _ in 0..n {
                q = self.step(&q);
            }
        } else {
            for _ in 0..(-n) {
                q = self.inverse_step(&q);
            }
        }
        q
    }

    fn metric(&self, p: &Point, q: &Point) -> f64;

    /// Whether `metric(p, q) > r`; systems with a cheap lower bound may decide early.
    fn metric_exceeds(&self, p: &Point, q: &Point, r: f64) -> bool {
        self.metric(p, q) > r
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point;

    /// Upper bound on the diameter of the space.
    fn diameter(&self) -> f64;

    /// Number of real coordinates of the grid chart; 0 for symbolic systems.
    fn grid_dims(&self) -> usize {
        0
    }

    /// Uniform grid with `res[i]` cells along coordinate `i`.
    fn grid(&self, _res: &[usize]) -> Option<Vec<Point>> {
        None
    }

    /// Exact point enumeration for finite-window symbolic systems.
    fn enumerate(&self, _max_points: usize) -> Option<Result<Vec<Point>>> {
        None
    }

    fn language(&self) -> Option<&dyn SymbolicLanguage> {
        None
    }

    /// Caveats such as rational rotation numbers.
    fn flags(&self) -> Vec<String> {
        Vec::new()
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "name": self.name() })
    }
}

/// Shared, immutable system handle.
#[derive(Clone)]
pub struct SystemHandle(Arc<dyn DynamicalSystem>);

impl SystemHandle {
    pub fn new<S: DynamicalSystem + 'static>(sys: S) -> Self {
        SystemHandle(Arc::new(sys))
    }

    /// `p, Tp, ..., T^n p`.
    pub fn orbit(&self, p: &Point, n: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(p.clone());
        for i in 0..n {
            let next = self.step(&out[i]);
            out.push(next);
        }
        out
    }
}

impl Deref for SystemHandle {
    type Target = dyn DynamicalSystem;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for SystemHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SystemHandle({})", self.0.name())
    }
}

/// Cartesian grid over `[0,1)^d`, lower-left cell corners, last coordinate fastest.
pub(crate) fn unit_grid(res: &[usize]) -> Vec<Vec<f64>> {
    let total: usize = res.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; res.len()];
    for _ in 0..total {
        out.push(
            idx.iter()
                .zip(res)
                .map(|(&i, &r)| i as f64 / r as f64)
                .collect(),
        );
        for k in (0..res.len()).rev() {
            idx[k] += 1;
            if idx[k] < res[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

pub(crate) fn expect_torus(p: &Point) -> &[f64] {
    match p {
        Point::Torus(t) => &t.coords,
        other => panic!("expected a torus point, got {other:?}"),
    }
}
