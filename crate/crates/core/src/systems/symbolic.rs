//! Full shifts and Sturmian subshifts on finite centered windows.
//!
//! A window of half-length `L` stands for the coordinates `-L..=L` of a
//! bi-infinite sequence. Full-shift windows are treated as periodic, so the
//! shift is an exact bijection on them. Sturmian windows remember the
//! rotation point they code and are re-coded after every step, which keeps
//! them legal for any number of steps.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    detect_rational, wrap01, DynamicalSystem, Point, PointKind, Provenance, SymbolicWindow,
    SystemHandle,
};
use crate::error::{Error, Result};

/// Longest word `sturmian_language` will enumerate.
pub const MAX_STURMIAN_WORD: usize = 64;

/// A symbol assignment on a set of positions together with a point realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub word: Vec<u8>,
    pub witness: Point,
}

/// The patterns a subshift realizes on a position set.
#[derive(Clone, Debug, PartialEq)]
pub enum WordSet {
    /// Every word over the alphabet occurs.
    All,
    Finite(Vec<Pattern>),
}

/// Exact language oracle of a subshift.
pub trait SymbolicLanguage: Send + Sync {
    fn alphabet(&self) -> u8;

    /// Patterns `(x_p)_{p in positions}` over all points `x`; `positions` sorted and distinct.
    fn words_on(&self, positions: &[i64]) -> Result<WordSet>;

    /// A point carrying `word` at `positions`, if one exists.
    fn realize(&self, positions: &[i64], word: &[u8]) -> Result<Option<Point>> {
        Ok(match self.words_on(positions)? {
            WordSet::All => None,
            WordSet::Finite(pats) => pats.into_iter().find(|p| p.word == word).map(|p| p.witness),
        })
    }
}

fn sturmian_symbol(alpha: f64, z: f64, n: i64) -> u8 {
    u8::from(wrap01(z + n as f64 * alpha) >= 1.0 - alpha)
}

/// Codes the orbit of `z` under rotation by `alpha` on positions `-L..=L`.
pub fn sturmian_code(alpha: f64, z: f64, half_len: usize) -> SymbolicWindow {
    let l = half_len as i64;
    SymbolicWindow {
        alphabet: 2,
        half_len,
        symbols: (-l..=l).map(|n| sturmian_symbol(alpha, z, n)).collect(),
        provenance: Some(Provenance { alpha, z: wrap01(z) }),
    }
}

fn check_irrational(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Precondition(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if let Some((p, q)) = detect_rational(alpha) {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} is rational ({p}/{q}); the coding is periodic"
        )));
    }
    Ok(())
}

/// One base point per arc of the circle cut at `{frac(-j alpha) : j in P or P-1}`.
fn arc_midpoints(alpha: f64, positions: &[i64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = positions
        .iter()
        .flat_map(|&j| [j, j + 1])
        .map(|j| wrap01(-(j as f64) * alpha))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let n = cuts.len();
    (0..n)
        .map(|i| {
            let a = cuts[i];
            let b = if i + 1 < n { cuts[i + 1] } else { cuts[0] + 1.0 };
            wrap01(0.5 * (a + b))
        })
        .collect()
}

fn sturmian_patterns(alpha: f64, positions: &[i64]) -> Vec<Pattern> {
    let reach = positions.iter().map(|p| p.unsigned_abs()).max().unwrap_or(0) as usize;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for z in arc_midpoints(alpha, positions) {
        let word: Vec<u8> = positions.iter().map(|&n| sturmian_symbol(alpha, z, n)).collect();
        if seen.insert(word.clone()) {
            out.push(Pattern {
                word,
                witness: Point::Symbolic(sturmian_code(alpha, z, reach)),
            });
        }
    }
    out.sort_by(|a, b| a.word.cmp(&b.word));
    out
}

/// All length-`n` factors of the Sturmian sequence of slope `alpha`, as 0/1 strings.
pub fn sturmian_language(alpha: f64, n: usize) -> Result<BTreeSet<String>> {
    check_irrational(alpha)?;
    if n > MAX_STURMIAN_WORD {
        return Err(Error::Precondition(format!(
            "word length {n} exceeds {MAX_STURMIAN_WORD}"
        )));
    }
    if n == 0 {
        return Ok(BTreeSet::from([String::new()]));
    }
    let positions: Vec<i64> = (0..n as i64).collect();
    Ok(sturmian_patterns(alpha, &positions)
        .into_iter()
        .map(|p| p.word.iter().map(|s| char::from(b'0' + s)).collect())
        .collect())
}

/// Orbit closure of the coding of rotation by `alpha`, on windows of half-length `L`.
#[derive(Clone, Debug)]
pub struct SturmianSystem {
    pub alpha: f64,
    pub half_len: usize,
}

pub fn make_sturmian(alpha: f64, half_len: usize) -> SystemHandle {
    SystemHandle::new(SturmianSystem { alpha, half_len })
}

impl SturmianSystem {
    fn recode(&self, p: &Point, shift: i64) -> Point {
        let w = p.as_window().expect("sturmian system expects symbolic windows");
        match w.provenance {
            Some(pv) => Point::Symbolic(sturmian_code(
                pv.alpha,
                pv.z + shift as f64 * pv.alpha,
                w.half_len,
            )),
            // no rotation point to recode from: fall back to the periodic shift
            None => Point::Symbolic(rotate_window(w, shift)),
        }
    }
}

impl DynamicalSystem for SturmianSystem {
    fn name(&self) -> String {
        format!("sturmian(alpha={}, L={})", self.alpha, self.half_len)
    }

    fn point_kind(&self) -> PointKind {
        PointKind::SymbolicWindow
    }

    fn step(&self, p: &Point) -> Point {
        self.recode(p, 1)
    }

    fn inverse_step(&self, p: &Point) -> Point {
        self.recode(p, -1)
    }

    fn step_n(&self, p: &Point, n: i64) -> Point {
        self.recode(p, n)
    }

    fn metric(&self, p: &Point, q: &Point) -> f64 {
        p.as_window().unwrap().metric(q.as_window().unwrap())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        Point::Symbolic(sturmian_code(self.alpha, rng.gen::<f64>(), self.half_len))
    }

    fn diameter(&self) -> f64 {
        1.0
    }

    fn enumerate(&self, max_points: usize) -> Option<Result<Vec<Point>>> {
        let l = self.half_len as i64;
        let count = 2 * self.half_len + 2;
        if count > max_points {
            return Some(Err(Error::Budget(format!(
                "{count} windows exceed the point budget {max_points}"
            ))));
        }
        let positions: Vec<i64> = (-l..=l).collect();
        Some(match check_irrational(self.alpha) {
            Err(e) => Err(e),
            Ok(()) => Ok(sturmian_patterns(self.alpha, &positions)
                .into_iter()
                .map(|p| p.witness)
                .collect()),
        })
    }

    fn language(&self) -> Option<&dyn SymbolicLanguage> {
        Some(self)
    }

    fn flags(&self) -> Vec<String> {
        match check_irrational(self.alpha) {
            Ok(()) => Vec::new(),
            Err(e) => vec![e.to_string()],
        }
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "name": "sturmian", "alpha": self.alpha, "L": self.half_len })
    }
}

impl SymbolicLanguage for SturmianSystem {
    fn alphabet(&self) -> u8 {
        2
    }

    fn words_on(&self, positions: &[i64]) -> Result<WordSet> {
        check_irrational(self.alpha)?;
        Ok(WordSet::Finite(sturmian_patterns(self.alpha, positions)))
    }
}

/// Periodic shift by `n` places: the result at position `i` is the input at `i + n`.
fn rotate_window(w: &SymbolicWindow, n: i64) -> SymbolicWindow {
    let len = w.symbols.len() as i64;
    let s = n.rem_euclid(len) as usize;
    let mut symbols = w.symbols.clone();
    symbols.rotate_left(s);
    SymbolicWindow {
        alphabet: w.alphabet,
        half_len: w.half_len,
        symbols,
        provenance: None,
    }
}

/// Full shift on `k` symbols, windows of half-length `L` with periodic boundary.
#[derive(Clone, Debug)]
pub struct FullShift {
    pub k: u8,
    pub half_len: usize,
}

pub fn make_fullshift(k: u8, half_len: usize) -> Result<SystemHandle> {
    if k < 2 {
        return Err(Error::Precondition(format!("alphabet size must be >= 2, got {k}")));
    }
    Ok(SystemHandle::new(FullShift { k, half_len }))
}

impl DynamicalSystem for FullShift {
    fn name(&self) -> String {
        format!("fullshift(k={}, L={})", self.k, self.half_len)
    }

    fn point_kind(&self) -> PointKind {
        PointKind::SymbolicWindow
    }

    fn step(&self, p: &Point) -> Point {
        Point::Symbolic(rotate_window(p.as_window().unwrap(), 1))
    }

    fn inverse_step(&self, p: &Point) -> Point {
        Point::Symbolic(rotate_window(p.as_window().unwrap(), -1))
    }

    fn step_n(&self, p: &Point, n: i64) -> Point {
        Point::Symbolic(rotate_window(p.as_window().unwrap(), n))
    }

    fn metric(&self, p: &Point, q: &Point) -> f64 {
        p.as_window().unwrap().metric(q.as_window().unwrap())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        let symbols = (0..2 * self.half_len + 1)
            .map(|_| rng.gen_range(0..self.k))
            .collect();
        Point::Symbolic(SymbolicWindow {
            alphabet: self.k,
            half_len: self.half_len,
            symbols,
            provenance: None,
        })
    }

    fn diameter(&self) -> f64 {
        1.0
    }

    fn enumerate(&self, max_points: usize) -> Option<Result<Vec<Point>>> {
        let len = 2 * self.half_len + 1;
        let total = (self.k as f64).powi(len as i32);
        if total > max_points as f64 {
            return Some(Err(Error::Budget(format!(
                "{total} windows exceed the point budget {max_points}"
            ))));
        }
        let total = total as usize;
        let k = self.k as usize;
        let mut out = Vec::with_capacity(total);
        for mut code in 0..total {
            let mut symbols = vec![0u8; len];
            for s in symbols.iter_mut().rev() {
                *s = (code % k) as u8;
                code /= k;
            }
            out.push(Point::Symbolic(SymbolicWindow {
                alphabet: self.k,
                half_len: self.half_len,
                symbols,
                provenance: None,
            }));
        }
        Some(Ok(out))
    }

    fn language(&self) -> Option<&dyn SymbolicLanguage> {
        Some(self)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "name": "fullshift", "k": self.k, "L": self.half_len })
    }
}

impl SymbolicLanguage for FullShift {
    fn alphabet(&self) -> u8 {
        self.k
    }

    fn words_on(&self, _positions: &[i64]) -> Result<WordSet> {
        Ok(WordSet::All)
    }

    fn realize(&self, positions: &[i64], word: &[u8]) -> Result<Option<Point>> {
        if word.iter().any(|&s| s >= self.k) || word.len() != positions.len() {
            return Ok(None);
        }
        let reach = positions.iter().map(|p| p.unsigned_abs()).max().unwrap_or(0) as usize;
        let half_len = reach.max(self.half_len);
        let mut symbols = vec![0u8; 2 * half_len + 1];
        for (&p, &s) in positions.iter().zip(word) {
            symbols[(p + half_len as i64) as usize] = s;
        }
        Ok(Some(Point::Symbolic(SymbolicWindow {
            alphabet: self.k,
            half_len,
            symbols,
            provenance: None,
        })))
    }
}
