//! Finite IP-sets and independence sets.
//!
//! For tuples of cylinder sets in a subshift with a language oracle the check
//! is exact. Otherwise it falls back to sampling orbits, where a positive
//! answer carries witnesses and a negative one only means the budget ran out.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::SearchBudget;
use crate::error::{Error, Result};
use crate::systems::{Point, SystemHandle, WordSet};

/// Most patterns `k^|F|` enumerated explicitly.
pub const MAX_PATTERNS: u64 = 1 << 20;
/// Most witnesses kept in a report.
pub const WITNESS_LIMIT: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IPSet {
    pub generators: Vec<u64>,
    pub elements: Vec<u64>,
}

/// All nonempty subset sums of `generators`, sorted and deduplicated.
pub fn fs_set(generators: &[u64]) -> Result<IPSet> {
    if generators.is_empty() {
        return Err(Error::Precondition("an IP-set needs at least one generator".into()));
    }
    if generators.contains(&0) {
        return Err(Error::Precondition("generators must be positive".into()));
    }
    if generators.len() > 24 {
        return Err(Error::Budget(format!("{} generators give too many subset sums", generators.len())));
    }
    let mut sums = BTreeSet::new();
    for mask in 1u32..1 << generators.len() {
        let s = generators
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .try_fold(0u64, |acc, (_, g)| acc.checked_add(*g))
            .ok_or_else(|| Error::Precondition("subset sum overflows u64".into()))?;
        sums.insert(s);
    }
    Ok(IPSet { generators: generators.to_vec(), elements: sums.into_iter().collect() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSet {
    /// Open ball `{x : rho(x, center) < radius}`.
    Ball { center: Point, radius: f64 },
    /// `{x : x_{anchor + i} = word_i}`.
    Cylinder { word: Vec<u8>, anchor: i64 },
}

impl TargetSet {
    pub fn cylinder(word: &[u8], anchor: i64) -> Self {
        TargetSet::Cylinder { word: word.to_vec(), anchor }
    }

    pub fn contains(&self, sys: &SystemHandle, p: &Point) -> bool {
        match self {
            TargetSet::Ball { center, radius } => sys.metric(p, center) < *radius,
            TargetSet::Cylinder { word, anchor } => match p.as_window() {
                Some(w) => word
                    .iter()
                    .enumerate()
                    .all(|(i, s)| w.symbol_at(anchor + i as i64) == Some(*s)),
                None => false,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetTuple {
    pub sets: Vec<TargetSet>,
}

impl SetTuple {
    pub fn new(sets: Vec<TargetSet>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::Precondition("a set tuple needs k >= 2 sets".into()));
        }
        Ok(SetTuple { sets })
    }

    /// `([0], [1])` at the origin.
    pub fn binary_cylinders() -> Self {
        SetTuple { sets: vec![TargetSet::cylinder(&[0], 0), TargetSet::cylinder(&[1], 0)] }
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    fn cylinders(&self) -> Option<Vec<(&[u8], i64)>> {
        self.sets
            .iter()
            .map(|s| match s {
                TargetSet::Cylinder { word, anchor } => Some((word.as_slice(), *anchor)),
                TargetSet::Ball { .. } => None,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactLanguage,
    Sampled,
}

/// Pattern `s` as set indices `1..=k`, one per element of `F`, and a point realizing it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternWitness {
    pub pattern: Vec<u8>,
    pub point: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub f: Vec<u64>,
    pub k: usize,
    pub verified: bool,
    pub method: Method,
    pub patterns_total: f64,
    pub patterns_realized: f64,
    /// Stored when the pattern count is at most [`WITNESS_LIMIT`].
    pub witnesses: Vec<PatternWitness>,
    /// Set when every pattern is realized by a product argument rather than enumeration.
    pub product_decision: bool,
    pub note: String,
}

fn decode(mut idx: u64, k: usize, len: usize) -> Vec<u8> {
    (0..len)
        .map(|_| {
            let d = (idx % k as u64) as u8 + 1;
            idx /= k as u64;
            d
        })
        .collect()
}

#[cfg(test)]
fn encode(pattern: &[u8], k: usize) -> u64 {
    pattern.iter().rev().fold(0u64, |acc, &d| acc * k as u64 + (d - 1) as u64)
}

/// Calls `visit` with the index of every pattern in the product of `choices` (bitmasks over sets).
fn for_each_product(choices: &[u32], k: usize, mut visit: impl FnMut(u64)) {
    let mut stack: Vec<(usize, u64, u64)> = vec![(0, 0, 1)];
    while let Some((pos, acc, place)) = stack.pop() {
        if pos == choices.len() {
            visit(acc);
            continue;
        }
        for c in 0..k {
            if choices[pos] >> c & 1 == 1 {
                stack.push((pos + 1, acc + c as u64 * place, place * k as u64));
            }
        }
    }
}

/// Marks the product of `choices` in `realized`, calling `on_new` for first-time patterns.
fn mark_product(choices: &[u32], k: usize, realized: &mut [bool], mut on_new: impl FnMut(u64)) {
    for_each_product(choices, k, |idx| {
        if !realized[idx as usize] {
            realized[idx as usize] = true;
            on_new(idx);
        }
    });
}

fn pattern_count(k: usize, len: usize) -> f64 {
    (k as f64).powi(len as i32)
}

/// Decides whether `F` is an independence set for `tuple`.
///
/// Checking `J = F` suffices: a point realizing a pattern on `F` realizes its restriction to any `J`.
pub fn check_independence(
    sys: &SystemHandle,
    tuple: &SetTuple,
    f: &[u64],
    budget: &SearchBudget,
) -> Result<IndependenceReport> {
    if tuple.k() < 2 {
        return Err(Error::Precondition("a set tuple needs k >= 2 sets".into()));
    }
    if tuple.k() > 32 {
        return Err(Error::Structure("at most 32 target sets are supported".into()));
    }
    let mut f: Vec<u64> = f.to_vec();
    f.sort_unstable();
    f.dedup();
    if f.is_empty() {
        return Err(Error::Precondition("F must be nonempty".into()));
    }
    match (sys.language(), tuple.cylinders()) {
        (Some(_), Some(cyl)) => exact(sys, tuple.k(), &cyl, &f),
        _ => sampled(sys, tuple, &f, budget),
    }
}

fn exact(sys: &SystemHandle, k: usize, cyl: &[(&[u8], i64)], f: &[u64]) -> Result<IndependenceReport> {
    let lang = sys.language().unwrap();
    let total = pattern_count(k, f.len());
    let mut report = IndependenceReport {
        f: f.to_vec(),
        k,
        verified: false,
        method: Method::ExactLanguage,
        patterns_total: total,
        patterns_realized: 0.0,
        witnesses: Vec::new(),
        product_decision: false,
        note: String::new(),
    };
    let mut positions = BTreeSet::new();
    for &j in f {
        for (word, anchor) in cyl {
            for i in 0..word.len() {
                positions.insert(j as i64 + anchor + i as i64);
            }
        }
    }
    let positions: Vec<i64> = positions.into_iter().collect();
    let index = |p: i64| positions.binary_search(&p).unwrap();

    // constraints of set c placed at time j, as (position index, symbol)
    let placed = |j: u64, c: usize| -> Vec<(usize, u8)> {
        let (word, anchor) = cyl[c];
        word.iter()
            .enumerate()
            .map(|(i, &s)| (index(j as i64 + anchor + i as i64), s))
            .collect()
    };

    match lang.words_on(&positions)? {
        WordSet::All => {
            let valid = cyl.iter().all(|(w, _)| !w.is_empty() && w.iter().all(|&s| s < lang.alphabet()));
            let spans: Vec<(i64, i64)> = f
                .iter()
                .map(|&j| {
                    let lo = cyl.iter().map(|(_, a)| j as i64 + a).min().unwrap();
                    let hi = cyl.iter().map(|(w, a)| j as i64 + a + w.len() as i64 - 1).max().unwrap();
                    (lo, hi)
                })
                .collect();
            let disjoint = spans.windows(2).all(|w| w[0].1 < w[1].0);
            if disjoint {
                report.product_decision = true;
                report.verified = valid;
                report.patterns_realized = if valid { total } else { 0.0 };
                report.note = "supports are pairwise disjoint in a full language".into();
                if valid && total <= WITNESS_LIMIT as f64 {
                    for idx in 0..total as u64 {
                        let pat = decode(idx, k, f.len());
                        let point = realize_full(lang, f, &pat, &placed, &positions)?;
                        report.witnesses.push(PatternWitness { pattern: pat, point });
                    }
                }
                return Ok(report);
            }
            if total > MAX_PATTERNS as f64 {
                return Err(Error::Structure(format!(
                    "{total} patterns exceed the enumeration limit {MAX_PATTERNS}"
                )));
            }
            let mut realized = 0u64;
            for idx in 0..total as u64 {
                let pat = decode(idx, k, f.len());
                let mut sym: Vec<Option<u8>> = vec![None; positions.len()];
                let ok = f.iter().zip(&pat).all(|(&j, &c)| {
                    placed(j, c as usize - 1).into_iter().all(|(p, s)| match sym[p] {
                        Some(t) => t == s,
                        None => {
                            sym[p] = Some(s);
                            true
                        }
                    })
                }) && valid;
                if ok {
                    realized += 1;
                    if total <= WITNESS_LIMIT as f64 {
                        let point = realize_full(lang, f, &pat, &placed, &positions)?;
                        report.witnesses.push(PatternWitness { pattern: pat, point });
                    }
                }
            }
            report.patterns_realized = realized as f64;
            report.verified = realized as f64 == total;
            report.note = "overlapping supports checked pattern by pattern".into();
        }
        WordSet::Finite(words) => {
            let choices: Vec<Vec<u32>> = words
                .iter()
                .map(|w| {
                    f.iter()
                        .map(|&j| {
                            (0..k)
                                .filter(|&c| placed(j, c).iter().all(|&(p, s)| w.word[p] == s))
                                .fold(0u32, |m, c| m | 1 << c)
                        })
                        .collect()
                })
                .collect();
            let upper: f64 = choices
                .iter()
                .map(|ch| ch.iter().map(|m| m.count_ones() as f64).product::<f64>())
                .sum();
            if upper < total {
                // too few words to carry every pattern; count the distinct ones exactly
                let mut distinct = std::collections::HashSet::new();
                for ch in &choices {
                    for_each_product(ch, k, |idx| {
                        distinct.insert(idx);
                    });
                }
                report.patterns_realized = distinct.len() as f64;
                report.note = format!(
                    "{} words of the language carry at most {upper} of {total} patterns",
                    words.len()
                );
                return Ok(report);
            }
            if total > MAX_PATTERNS as f64 {
                return Err(Error::Structure(format!(
                    "{total} patterns exceed the enumeration limit {MAX_PATTERNS}"
                )));
            }
            let mut realized = vec![false; total as usize];
            let mut first: Vec<(u64, usize)> = Vec::new();
            for (wi, ch) in choices.iter().enumerate() {
                mark_product(ch, k, &mut realized, |idx| first.push((idx, wi)));
            }
            let count = first.len();
            report.patterns_realized = count as f64;
            report.verified = count as f64 == total;
            if total <= WITNESS_LIMIT as f64 {
                first.sort_unstable();
                report.witnesses = first
                    .into_iter()
                    .map(|(idx, wi)| PatternWitness {
                        pattern: decode(idx, k, f.len()),
                        point: words[wi].witness.clone(),
                    })
                    .collect();
            }
            report.note = format!("{} words of the language on {} positions", words.len(), positions.len());
        }
    }
    Ok(report)
}

fn realize_full(
    lang: &dyn crate::systems::SymbolicLanguage,
    f: &[u64],
    pat: &[u8],
    placed: &dyn Fn(u64, usize) -> Vec<(usize, u8)>,
    positions: &[i64],
) -> Result<Point> {
    let mut sym = vec![0u8; positions.len()];
    for (&j, &c) in f.iter().zip(pat) {
        for (p, s) in placed(j, c as usize - 1) {
            sym[p] = s;
        }
    }
    lang.realize(positions, &sym)?
        .ok_or_else(|| Error::Structure("full language failed to realize a word".into()))
}

fn sampled(sys: &SystemHandle, tuple: &SetTuple, f: &[u64], budget: &SearchBudget) -> Result<IndependenceReport> {
    budget.validate()?;
    let k = tuple.k();
    let total = pattern_count(k, f.len());
    if total > MAX_PATTERNS as f64 {
        return Err(Error::Structure(format!(
            "{total} patterns exceed the enumeration limit {MAX_PATTERNS}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    rng.set_stream(4);
    let samples: Vec<Point> = (0..budget.max_points).map(|_| sys.sample(&mut rng)).collect();
    let last = *f.last().unwrap();
    let masks: Vec<Option<Vec<u32>>> = samples
        .par_iter()
        .map(|x| {
            let mut out = Vec::with_capacity(f.len());
            let mut q = x.clone();
            let mut t = 0u64;
            for &j in f {
                while t < j {
                    q = sys.step(&q);
                    t += 1;
                }
                let m = (0..k)
                    .filter(|&c| tuple.sets[c].contains(sys, &q))
                    .fold(0u32, |m, c| m | 1 << c);
                if m == 0 {
                    return None;
                }
                out.push(m);
            }
            debug_assert_eq!(t, last);
            Some(out)
        })
        .collect();
    let mut realized = vec![false; total as usize];
    let mut first: Vec<(u64, usize)> = Vec::new();
    for (si, m) in masks.iter().enumerate() {
        if let Some(ch) = m {
            mark_product(ch, k, &mut realized, |idx| first.push((idx, si)));
            if first.len() as f64 == total {
                break;
            }
        }
    }
    let count = first.len();
    first.sort_unstable();
    let witnesses = if total <= WITNESS_LIMIT as f64 {
        first
            .into_iter()
            .map(|(idx, si)| PatternWitness { pattern: decode(idx, k, f.len()), point: samples[si].clone() })
            .collect()
    } else {
        Vec::new()
    };
    let verified = count as f64 == total;
    Ok(IndependenceReport {
        f: f.to_vec(),
        k,
        verified,
        method: Method::Sampled,
        patterns_total: total,
        patterns_realized: count as f64,
        witnesses,
        product_decision: false,
        note: if verified {
            format!("every pattern witnessed among {} sampled orbits", samples.len())
        } else {
            format!("budget-exhausted after {} sampled orbits", samples.len())
        },
    })
}

/// Times tested for generators `p`: `{0}` together with `FS(p)`.
pub fn anchored_fs(generators: &[u64]) -> Result<Vec<u64>> {
    let mut v = fs_set(generators)?.elements;
    v.insert(0, 0);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum IpSearchResult {
    Found {
        generators: Vec<u64>,
        f: Vec<u64>,
        tuples_scanned: u64,
        patterns_checked: f64,
        method: Method,
    },
    /// No tuple passed; finite evidence only.
    Exhausted {
        tuples_scanned: u64,
        patterns_checked: f64,
    },
}

impl IpSearchResult {
    pub fn status(&self) -> &'static str {
        match self {
            IpSearchResult::Found { .. } => "Found",
            IpSearchResult::Exhausted { .. } => "Exhausted",
        }
    }

    pub fn generators(&self) -> Option<&[u64]> {
        match self {
            IpSearchResult::Found { generators, .. } => Some(generators),
            IpSearchResult::Exhausted { .. } => None,
        }
    }

    pub fn patterns_checked(&self) -> f64 {
        match self {
            IpSearchResult::Found { patterns_checked, .. } | IpSearchResult::Exhausted { patterns_checked, .. } => {
                *patterns_checked
            }
        }
    }
}

/// Nondecreasing tuples of `[1, bound]^m` in lexicographic order.
pub fn nondecreasing_tuples(m: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let mut cur: Option<Vec<u64>> = if m == 0 || bound == 0 { None } else { Some(vec![1; m]) };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = m;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < bound {
                next[i] += 1;
                for t in i + 1..m {
                    next[t] = next[i];
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}

const SCAN_CHUNK: usize = 4096;

/// First nondecreasing generator tuple in `[1, bound]^m` whose anchored IP-set
/// `{0} + FS(p)` is an independence set for `tuple`.
pub fn find_ip_independence(
    sys: &SystemHandle,
    tuple: &SetTuple,
    m: usize,
    bound: u64,
    budget: &SearchBudget,
) -> Result<IpSearchResult> {
    if m == 0 || bound == 0 {
        return Err(Error::Precondition("m and the generator bound must be >= 1".into()));
    }
    let mut scanned = 0u64;
    let mut checked = 0.0f64;
    let mut iter = nondecreasing_tuples(m, bound).peekable();
    while iter.peek().is_some() {
        let chunk: Vec<Vec<u64>> = iter.by_ref().take(SCAN_CHUNK).collect();
        let results: Vec<Result<(bool, f64, Method)>> = chunk
            .par_iter()
            .map(|g| {
                let f = anchored_fs(g)?;
                let r = check_independence(sys, tuple, &f, budget)?;
                Ok((r.verified, r.patterns_total, r.method))
            })
            .collect();
        for (g, r) in chunk.iter().zip(results) {
            let (ok, pats, method) = r?;
            scanned += 1;
            checked += pats;
            if ok {
                return Ok(IpSearchResult::Found {
                    generators: g.clone(),
                    f: anchored_fs(g)?,
                    tuples_scanned: scanned,
                    patterns_checked: checked,
                    method,
                });
            }
        }
    }
    Ok(IpSearchResult::Exhausted { tuples_scanned: scanned, patterns_checked: checked })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderRow {
    pub m: usize,
    pub bound: u64,
    pub result: IpSearchResult,
    pub wall_time_s: f64,
}

/// Runs [`find_ip_independence`] for each `(m, bound)`; rows follow the input order.
pub fn ip_ladder(
    sys: &SystemHandle,
    tuple: &SetTuple,
    ms: &[usize],
    bounds: &[u64],
    budget: &SearchBudget,
) -> Result<Vec<LadderRow>> {
    let mut rows = Vec::new();
    for &b in bounds {
        for &m in ms {
            let t0 = std::time::Instant::now();
            let result = find_ip_independence(sys, tuple, m, b, budget)?;
            rows.push(LadderRow { m, bound: b, result, wall_time_s: t0.elapsed().as_secs_f64() });
        }
    }
    Ok(rows)
}

/// Largest `m` with a witness at each bound.
pub fn ladder_summary(rows: &[LadderRow]) -> Vec<(u64, Option<usize>)> {
    let bounds: BTreeSet<u64> = rows.iter().map(|r| r.bound).collect();
    bounds
        .into_iter()
        .map(|b| {
            let best = rows
                .iter()
                .filter(|r| r.bound == b && r.result.generators().is_some())
                .map(|r| r.m)
                .max();
            (b, best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{make_fullshift, make_rotation, make_sturmian, GOLDEN};

    #[test]
    fn subset_sums() {
        assert_eq!(fs_set(&[1, 2]).unwrap().elements, vec![1, 2, 3]);
        assert_eq!(fs_set(&[1, 2, 4]).unwrap().elements, (1..=7).collect::<Vec<_>>());
        assert_eq!(fs_set(&[2, 2]).unwrap().elements, vec![2, 4]);
        assert!(fs_set(&[]).is_err());
        assert!(fs_set(&[0, 1]).is_err());
    }

    #[test]
    fn tuples_in_order() {
        let t: Vec<Vec<u64>> = nondecreasing_tuples(2, 3).collect();
        assert_eq!(
            t,
            vec![vec![1, 1], vec![1, 2], vec![1, 3], vec![2, 2], vec![2, 3], vec![3, 3]]
        );
        assert_eq!(nondecreasing_tuples(4, 50).count(), 292_825);
    }

    #[test]
    fn pattern_codec() {
        for idx in 0..27 {
            assert_eq!(encode(&decode(idx, 3, 3), 3), idx);
        }
    }

    #[test]
    fn fullshift_small_f() {
        let fs = make_fullshift(2, 4).unwrap();
        let r = check_independence(&fs, &SetTuple::binary_cylinders(), &[0, 1, 2], &SearchBudget::default()).unwrap();
        assert!(r.verified);
        assert_eq!(r.method, Method::ExactLanguage);
        assert_eq!(r.witnesses.len(), 8);
        for w in &r.witnesses {
            let win = w.point.as_window().unwrap();
            for (j, s) in [0i64, 1, 2].iter().zip(&w.pattern) {
                assert_eq!(win.symbol_at(*j), Some(s - 1));
            }
        }
    }

    #[test]
    fn overlapping_cylinders_in_full_shift() {
        let fs = make_fullshift(2, 4).unwrap();
        // [00] and [11] at times 0 and 1 overlap: patterns (1,2) and (2,1) are contradictory
        let tuple = SetTuple::new(vec![TargetSet::cylinder(&[0, 0], 0), TargetSet::cylinder(&[1, 1], 0)]).unwrap();
        let r = check_independence(&fs, &tuple, &[0, 1], &SearchBudget::default()).unwrap();
        assert!(!r.verified);
        assert_eq!(r.patterns_realized, 2.0);
    }

    #[test]
    fn sturmian_pairs_match_brute_force() {
        let st = make_sturmian(GOLDEN, 4);
        for n in 1..=12u64 {
            let r = check_independence(&st, &SetTuple::binary_cylinders(), &[0, n], &SearchBudget::default()).unwrap();
            let mut seen = BTreeSet::new();
            for i in 0..100_000 {
                let z = i as f64 / 100_000.0;
                let w = crate::systems::sturmian_code(GOLDEN, z, n as usize);
                seen.insert((w.symbol_at(0).unwrap(), w.symbol_at(n as i64).unwrap()));
            }
            assert_eq!(r.verified, seen.len() == 4, "n={n}");
            assert_eq!(r.patterns_realized as usize, seen.len(), "n={n}");
        }
    }

    #[test]
    fn singleton_needs_only_nonempty_sets() {
        let r = make_rotation(vec![GOLDEN]);
        let tuple = SetTuple::new(vec![
            TargetSet::Ball { center: Point::torus(&[0.1]), radius: 0.05 },
            TargetSet::Ball { center: Point::torus(&[0.6]), radius: 0.05 },
        ])
        .unwrap();
        let budget = SearchBudget { max_points: 2000, ..SearchBudget::with_seed(1) };
        let rep = check_independence(&r, &tuple, &[7], &budget).unwrap();
        assert!(rep.verified);
        assert_eq!(rep.method, Method::Sampled);
        for w in &rep.witnesses {
            let q = r.step_n(&w.point, 7);
            assert!(tuple.sets[w.pattern[0] as usize - 1].contains(&r, &q));
        }
    }

    #[test]
    fn verified_sets_restrict_to_subsets() {
        let st = make_sturmian(GOLDEN, 4);
        let f = [0u64, 3, 5];
        let r = check_independence(&st, &SetTuple::binary_cylinders(), &f, &SearchBudget::default()).unwrap();
        for w in &r.witnesses {
            let win = w.point.as_window().unwrap();
            for (j, s) in f.iter().zip(&w.pattern) {
                assert_eq!(win.symbol_at(*j as i64), Some(s - 1));
            }
        }
    }

    #[test]
    fn fullshift_ip_search_first_hit() {
        let fs = make_fullshift(2, 3).unwrap();
        let r = find_ip_independence(&fs, &SetTuple::binary_cylinders(), 3, 5, &SearchBudget::default()).unwrap();
        assert_eq!(r.generators(), Some(&[1u64, 1, 1][..]));
    }
}
