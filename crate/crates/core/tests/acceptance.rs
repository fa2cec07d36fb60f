//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
//! its measured values and wall time; the test fails if any criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nildyn::averages::{oscillation_contrast, Observable};
use nildyn::complexity::{
    complexity_curve, geometric_ns, inverse_limit_complexity_bound, GrowthClass,
};
use nildyn::cubes::{cube_criterion, rp_test, witness_delta, RpOutcome};
use nildyn::independence::{check_independence, find_ip_independence, fs_set, IpSearchResult, SetTuple};
use nildyn::nilgroup::{GroupElement, MalcevCoord, NilGroupSpec};
use nildyn::nilmetric::{dist_group, orbit_distance_growth};
use nildyn::systems::furstenberg::{FurstenbergRecipe, FurstenbergSystem};
use nildyn::systems::nil::NilSystem;
use nildyn::systems::symbolic::sturmian_language;
use nildyn::systems::tower::FactorMap;
use nildyn::systems::{
    make_furstenberg, make_fullshift, make_inverse_limit, make_nilsystem, make_rotation, make_skew_product,
    make_sturmian, Point, SymbolicWindow, GOLDEN, SILVER,
};
use nildyn::SearchBudget;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let out = f();
    let dt = t0.elapsed();
    let in_time = dt <= limit;
    let pass = out.pass && in_time;
    println!(
        "{} [{id:>2}] {name}: {} ({:.2}s, limit {}s{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        dt.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", over time" }
    );
    pass
}

fn heis() -> Arc<NilGroupSpec> {
    Arc::new(NilGroupSpec::heisenberg3())
}

fn coord(t: &[f64]) -> MalcevCoord {
    MalcevCoord::new(t.to_vec()).unwrap()
}

type Mat = [[f64; 3]; 3];

fn to_mat(t: &[f64]) -> Mat {
    [[1.0, t[0], t[2]], [0.0, 1.0, t[1]], [0.0, 0.0, 1.0]]
}

fn from_mat(m: &Mat) -> [f64; 3] {
    [m[0][1], m[1][2], m[0][2]]
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn mat_inv(a: &Mat) -> Mat {
    // unipotent upper triangular
    let (x, y, z) = (a[0][1], a[1][2], a[0][2]);
    [[1.0, -x, x * y - z], [0.0, 1.0, -y], [0.0, 0.0, 1.0]]
}

fn mat_pow(a: &Mat, n: i64) -> Mat {
    let base = if n < 0 { mat_inv(a) } else { *a };
    let mut out = to_mat(&[0.0, 0.0, 0.0]);
    for _ in 0..n.unsigned_abs() {
        out = mat_mul(&out, &base);
    }
    out
}

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let g = heis();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let n: i64 = rng.gen_range(-4..=4);
        let (ca, cb) = (coord(&a), coord(&b));
        let (ma, mb) = (to_mat(&a), to_mat(&b));
        worst = worst.max(max_err(g.mul(&ca, &cb).as_slice(), &from_mat(&mat_mul(&ma, &mb))));
        worst = worst.max(max_err(g.inv(&ca).as_slice(), &from_mat(&mat_inv(&ma))));
        worst = worst.max(max_err(g.pow(&ca, n).as_slice(), &from_mat(&mat_pow(&ma, n))));
    }
    Outcome { pass: worst <= 1e-12, detail: format!("max componentwise error {worst:.2e}") }
}

fn criterion_2() -> Outcome {
    let g = heis();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut draw = || coord(&(0..3).map(|_| rng.gen_range(-10.0..10.0)).collect::<Vec<_>>());
        let (x, y, h) = (draw(), draw(), draw());
        let d = dist_group(&g, &x, &y);
        let dh = dist_group(&g, &g.mul(&x, &h), &g.mul(&y, &h));
        worst = worst.max((d - dh).abs());
    }
    Outcome { pass: worst <= 1e-12, detail: format!("max |d(xg,yg) - d(x,y)| = {worst:.2e}") }
}

fn criterion_3() -> Outcome {
    let g = heis();
    let tau = GroupElement::from_slice(&g, &[GOLDEN, SILVER, 0.3]).unwrap();
    let sys = NilSystem::new(g, tau).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut slopes = Vec::new();
    for _ in 0..5 {
        let t: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
        let x = sys.point(&t).unwrap();
        let y = sys.point(&[t[0], t[1] + 1e-4, t[2]]).unwrap();
        let rep = orbit_distance_growth(&sys, &x, &y, 1000).unwrap();
        slopes.push(rep.slope);
    }
    let ok = slopes.iter().all(|s| (0.8..=2.2).contains(s));
    Outcome { pass: ok, detail: format!("log-log slopes {slopes:.3?}") }
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let rot = make_rotation(vec![GOLDEN]);
    let ns: Vec<u64> = geometric_ns(100);
    let c = complexity_curve(&rot, &ns, 0.1, &SearchBudget::with_seed(4)).unwrap();
    let at = |n: u64| c.records.iter().find(|r| r.n == n).map(|r| r.r_estimate);
    let fit = c.fit.as_ref().map(|f| f.class);
    ok &= fit == Some(GrowthClass::Bounded) && at(100).is_some() && at(100) == at(11).or(at(10));
    notes.push(format!("rotation {:?} r(11)={:?} r(100)={:?}", fit, at(11), at(100)));

    let skew = make_skew_product(GOLDEN);
    let budget = SearchBudget { grid_resolution: vec![2000, 40], ..SearchBudget::with_seed(4) };
    let c = complexity_curve(&skew, &geometric_ns(60), 0.1, &budget).unwrap();
    let f = c.fit.clone().unwrap();
    ok &= f.class == GrowthClass::Polynomial && (0.5..=3.0).contains(&f.parameter);
    notes.push(format!(
        "skew {:?} exponent {:.3} r(1)={} r(60)={}",
        f.class,
        f.parameter,
        c.records[0].r_estimate,
        c.records.last().unwrap().r_estimate
    ));

    let fs = make_fullshift(2, 6).unwrap();
    let ns: Vec<u64> = (1..=10).collect();
    let c = complexity_curve(&fs, &ns, 0.4, &SearchBudget::with_seed(4)).unwrap();
    let f = c.fit.clone().unwrap();
    ok &= f.class == GrowthClass::Exponential && (0.8..=1.2).contains(&f.parameter);
    notes.push(format!("fullshift {:?} log2-rate {:.3}", f.class, f.parameter));
    Outcome { pass: ok, detail: notes.join("; ") }
}

fn criterion_5() -> Outcome {
    let rot = make_rotation(vec![GOLDEN]);
    let skew = make_skew_product(GOLDEN);
    let tower = make_inverse_limit(vec![rot.clone(), skew.clone()], vec![FactorMap::torus_projection(1)]).unwrap();
    let eps = 0.3;
    let delta = eps - 0.25;
    let ns = geometric_ns(32);
    let seed = SearchBudget::with_seed(5);
    let measured = complexity_curve(&tower, &ns, eps, &seed).unwrap();
    let lvl1 = complexity_curve(&rot, &ns, delta, &seed).unwrap();
    let skew_budget = SearchBudget { grid_resolution: vec![2000, 80], ..seed.clone() };
    let lvl2 = complexity_curve(&skew, &ns, delta, &skew_budget).unwrap();
    let bound = inverse_limit_complexity_bound(&[lvl1, lvl2], eps).unwrap();
    let pairs: Vec<(u64, u64, u64)> = measured
        .records
        .iter()
        .zip(&bound.records)
        .map(|(m, b)| (m.n, m.r_estimate, b.r_estimate))
        .collect();
    let ok = pairs.iter().all(|&(_, m, b)| m <= b);
    Outcome { pass: ok, detail: format!("(n, measured, bound) {pairs:?}") }
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    for n in 1..=30 {
        ok &= sturmian_language(GOLDEN, n).unwrap().len() == n + 1;
    }
    let mut mismatch = Vec::new();
    for n in 1..=12usize {
        let brute: BTreeSet<String> = (0..100_000)
            .map(|j| {
                let z = j as f64 / 100_000.0;
                (0..n)
                    .map(|i| {
                        let x = (z + i as f64 * GOLDEN).fract();
                        if x >= 1.0 - GOLDEN { '1' } else { '0' }
                    })
                    .collect()
            })
            .collect();
        if brute != sturmian_language(GOLDEN, n).unwrap() {
            mismatch.push(n);
        }
    }
    ok &= mismatch.is_empty();
    Outcome { pass: ok, detail: format!("n+1 words for n <= 30; brute-force mismatches at n = {mismatch:?}") }
}

fn criterion_7() -> Outcome {
    let tuple = SetTuple::binary_cylinders();
    let fs = make_fullshift(2, 255).unwrap();
    let budget = SearchBudget::with_seed(7);
    let mut verified = Vec::new();
    for m in 1..=8u32 {
        let gens: Vec<u64> = (0..m).map(|i| 1u64 << i).collect();
        let f = fs_set(&gens).unwrap().elements;
        verified.push(check_independence(&fs, &tuple, &f, &budget).unwrap().verified);
    }
    let st = make_sturmian(GOLDEN, 200);
    let m1 = find_ip_independence(&st, &tuple, 1, 50, &budget).unwrap();
    let m4 = find_ip_independence(&st, &tuple, 4, 50, &budget).unwrap();
    let ok = verified.iter().all(|v| *v)
        && matches!(m1, IpSearchResult::Found { .. })
        && matches!(m4, IpSearchResult::Exhausted { .. });
    Outcome {
        pass: ok,
        detail: format!(
            "fullshift m<=8 verified {verified:?}; sturmian m=1 {} {:?}; m=4 {} after {} tuples",
            m1.status(),
            m1.generators(),
            m4.status(),
            match &m4 {
                IpSearchResult::Exhausted { tuples_scanned, .. } | IpSearchResult::Found { tuples_scanned, .. } =>
                    *tuples_scanned,
            }
        ),
    }
}

fn criterion_8() -> Outcome {
    let budget = SearchBudget { max_n_values: 10_000, max_candidates: 1000, ..SearchBudget::with_seed(8) };
    let rot = make_rotation(vec![GOLDEN]);
    let r = rp_test(&rot, &Point::torus(&[0.1]), &Point::torus(&[0.4]), 1, 0.05, &budget).unwrap();
    let rot_ok = matches!(r, RpOutcome::NotFound { .. });

    let skew = make_skew_product(GOLDEN);
    let (p, q) = (Point::torus(&[0.2, 0.1]), Point::torus(&[0.2, 0.7]));
    let s = rp_test(&skew, &p, &q, 1, 0.05, &budget).unwrap();
    let skew_delta = s.witness().map(|w| witness_delta(&skew, &p, &q, w));
    let skew_ok = skew_delta.is_some_and(|d| d < 0.05);

    let fs = make_fullshift(2, 8).unwrap();
    let x1 = Point::Symbolic(SymbolicWindow::constant(2, 0, 8).unwrap());
    let x2 = Point::Symbolic(SymbolicWindow::constant(2, 1, 8).unwrap());
    let rep = cube_criterion(&fs, &x1, &x2, 2, 0.3, &budget).unwrap();
    let cube_ok = rep.patterns.len() == 16 && rep.all_realized();
    Outcome {
        pass: rot_ok && skew_ok && cube_ok,
        detail: format!(
            "rotation {}; skew witness delta {:?}; cube criterion {}/16 patterns",
            if rot_ok { "NotFound" } else { "found a witness" },
            skew_delta,
            rep.patterns.iter().filter(|p| p.realized).count()
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=50 {
        let s = FurstenbergSystem { recipe: FurstenbergRecipe::default_recipe(k), lambda: 1.0 };
        for i in 0..1000 {
            let th = i as f64 / 1000.0;
            worst = worst.max((s.h(th) - (s.big_h(th + s.recipe.alpha) - s.big_h(th))).abs());
        }
    }
    let furst = make_furstenberg(FurstenbergRecipe::default_recipe(30), 1.0).unwrap();
    let g = heis();
    let tau = GroupElement::from_slice(&g, &[GOLDEN, SILVER, 0.3]).unwrap();
    let chart = NilSystem::new(g.clone(), tau.clone()).unwrap();
    let nil = make_nilsystem(g, tau).unwrap();
    let starts: Vec<Point> = [0.1, 0.37, 0.71].iter().map(|&t| Point::torus(&[t, 0.0])).collect();
    let nil_starts: Vec<Point> =
        [0.1, 0.37, 0.71].iter().map(|&t| Point::Quotient(chart.point(&[t, 0.2, 0.5]).unwrap())).collect();
    let rep = oscillation_contrast(
        (&furst, &Observable::Cos { coord: 1, freq: 1.0 }, &starts),
        (&nil, &Observable::NilFiber, &nil_starts),
        1_000_000,
    )
    .unwrap();
    Outcome {
        pass: worst <= 1e-10 && rep.ratio >= 5.0,
        detail: format!(
            "coboundary error {worst:.2e}; experiment: oscillation {:.3e} vs baseline {:.3e}, ratio {:.1}",
            rep.subject_oscillation, rep.baseline_oscillation, rep.ratio
        ),
    }
}

fn nildyn(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_nildyn")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "system = \"skew:alpha=golden\"\nseed = 11\n[rp-test]\nx = \"0.2;0.1\"\ny = \"0.2;0.7\"\ndelta = 0.05\nmax-n-values = 2001\n").unwrap();
    let cfg = cfg.to_str().unwrap().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["simulate", "--system", "nilsystem", "--steps", "50", "--seed", "3"],
        vec!["complexity", "--system", "skew:alpha=golden", "--eps", "0.2", "--n-max", "16"],
        vec!["complexity", "--system", "fullshift:k=2,L=4", "--eps", "0.4", "--ns", "1,2,3", "--json"],
        vec!["rp-test", "--config", &cfg],
        vec!["cube-criterion", "--system", "fullshift:L=8", "--x1", "const:0", "--x2", "const:1", "--d", "2", "--delta", "0.3", "--seed", "5"],
        vec!["ind-check", "--system", "sturmian:L=40", "--gens", "1,3,8", "--seed", "2"],
        vec!["ind-check", "--system", "rotation", "--sets", "ball:0.1/0.2,ball:0.6/0.2", "--f", "0,1,2", "--seed", "2", "--max-points", "5000"],
        vec!["ip-search", "--system", "fullshift:L=16", "--m", "1,2,3", "--bound", "4", "--seed", "1"],
        vec!["averages", "--system", "furstenberg:K=10", "--n-max", "4096", "--seed", "4"],
        vec!["averages", "--system", "rotation", "--probe", "--n-max", "1024", "--seed", "4"],
        vec!["validate-group", "--spec", "heisenberg3", "--samples", "500"],
    ];
    let mut diffs = Vec::new();
    for (i, c) in commands.iter().enumerate() {
        let first = nildyn(c);
        let mut threaded = c.clone();
        threaded.extend(["--threads", "3"]);
        let second = nildyn(&threaded);
        if first.0 != 0 || first != second || first.1.is_empty() {
            diffs.push((i, c[0], first.0, second.0));
        }
    }
    Outcome {
        pass: diffs.is_empty(),
        detail: format!("{} commands run twice; differing or failing: {diffs:?}", commands.len()),
    }
}

#[test]
fn acceptance() {
    let results = [
        run(1, "group law vs matrix oracle", Duration::from_secs(1), criterion_1),
        run(2, "metric right-invariance", Duration::from_secs(1), criterion_2),
        run(3, "orbit-distance growth", Duration::from_secs(10), criterion_3),
        run(4, "complexity trichotomy", Duration::from_secs(300), criterion_4),
        run(5, "inverse-limit bound", Duration::from_secs(120), criterion_5),
        run(6, "sturmian exactness", Duration::from_secs(30), criterion_6),
        run(7, "independence ladder", Duration::from_secs(120), criterion_7),
        run(8, "regional proximality fixtures", Duration::from_secs(180), criterion_8),
        run(9, "coboundary and oscillation contrast", Duration::from_secs(60), criterion_9),
        run(10, "cli determinism", Duration::from_secs(300), criterion_10),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
