//! The `nildyn` command line.
//!
//! Exit codes: 0 success, 2 configuration or precondition error, 3 budget
//! exhausted where the command treats that as failure, 64 usage error.

mod config;
mod system;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::averages::{birkhoff, power_grid, unique_ergodicity_probe, Observable};
use crate::budget::SearchBudget;
use crate::complexity::{complexity_curve, geometric_ns};
use crate::cubes::{cube_criterion, rp_test, RpOutcome};
use crate::error::{Error, Result};
use crate::independence::{check_independence, fs_set, ip_ladder, ladder_summary, SetTuple, TargetSet};
use crate::nilgroup::NilGroupSpec;
use crate::systems::Point;
use crate::VERSION;

pub use config::ConfigFile;
pub use system::{build_system, BuiltSystem};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "NILDYN_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "nildyn", version, about = "Experiments on nilsystems and related topological dynamics")]
struct Cli {
    /// TOML experiment file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: $NILDYN_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock times in reports; breaks byte-for-byte reproducibility.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit of one point, as CSV.
    Simulate(SimulateArgs),
    /// Shadowing-net complexity curve and growth fit.
    Complexity(ComplexityArgs),
    /// Search for a regional-proximality witness of order d.
    RpTest(RpArgs),
    /// Realize every pattern of the cube criterion for a pair.
    CubeCriterion(CubeArgs),
    /// Decide whether a finite set is an independence set.
    IndCheck(IndArgs),
    /// Ladder of IP-independence searches.
    IpSearch(IpArgs),
    /// Birkhoff averages, or a unique-ergodicity probe.
    Averages(AvgArgs),
    /// Randomized axiom checks on a group law.
    ValidateGroup(GroupArgs),
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct SimulateArgs {
    #[arg(long)]
    system: Option<String>,
    /// Start point; a seeded sample when absent.
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    /// Emit every k-th point.
    #[arg(long)]
    every: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct ComplexityArgs {
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    /// Largest n; the n grid is geometric from 1 unless --ns is given.
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    ns: Vec<u64>,
    /// Cells per dimension, one value or one per dimension.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<usize>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct RpArgs {
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_n_values: Option<usize>,
    #[arg(long)]
    max_candidates: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct CubeArgs {
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    x1: Option<String>,
    #[arg(long)]
    x2: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_n_values: Option<usize>,
    #[arg(long)]
    max_candidates: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct IndArgs {
    #[arg(long)]
    system: Option<String>,
    /// Target sets: `word@anchor` cylinders or `ball:c1;c2/radius`; default `0@0,1@0`.
    #[arg(long, value_delimiter = ',')]
    sets: Vec<String>,
    /// Explicit finite set F.
    #[arg(long, value_delimiter = ',')]
    f: Vec<u64>,
    /// Generators; F becomes their finite sums.
    #[arg(long, value_delimiter = ',')]
    gens: Vec<u64>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct IpArgs {
    #[arg(long)]
    system: Option<String>,
    #[arg(long, value_delimiter = ',')]
    sets: Vec<String>,
    /// Generator counts to try.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Generator bounds to try.
    #[arg(long, value_delimiter = ',')]
    bound: Vec<u64>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct AvgArgs {
    #[arg(long)]
    system: Option<String>,
    /// `coord:i`, `cos:i[:freq]`, `sin:i[:freq]`, `nilfiber`, `const:c`, `symbol:k`; repeatable.
    #[arg(long = "observable")]
    observables: Vec<String>,
    /// Start point; repeatable. Three seeded samples when absent.
    #[arg(long = "start")]
    starts: Vec<String>,
    #[arg(long)]
    n_max: Option<u64>,
    /// Report the spread of final averages across starts as JSON.
    #[arg(long)]
    probe: bool,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(default, deny_unknown_fields)]
struct GroupArgs {
    /// Built-in name or path to a JSON group spec.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_CONFIG,
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Budget(_) => EXIT_BUDGET,
                _ => EXIT_CONFIG,
            }
        }
    }
}

struct Globals {
    out: Option<PathBuf>,
    timing: bool,
}

fn execute(cli: Cli) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let threads = match cli.threads {
        Some(t) => t,
        None => match cfg.top("threads") {
            Some(v) => v.as_u64().ok_or_else(|| Error::Parse("config: threads must be an integer".into()))? as usize,
            None => match std::env::var(THREADS_ENV) {
                Ok(s) => s.trim().parse().map_err(|_| Error::Parse(format!("{THREADS_ENV}={s} is not an integer")))?,
                Err(_) => 0,
            },
        },
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.top("out").and_then(|v| v.as_str()).map(PathBuf::from));
    let timing = cli.timing || cfg.top("timing").and_then(|v| v.as_bool()).unwrap_or(false);
    let g = Globals { out, timing };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Simulate(a) => simulate(&g, cfg.merge("simulate", a)?),
        Command::Complexity(a) => complexity(&g, cfg.merge("complexity", a)?),
        Command::RpTest(a) => rp(&g, cfg.merge("rp-test", a)?),
        Command::CubeCriterion(a) => cube(&g, cfg.merge("cube-criterion", a)?),
        Command::IndCheck(a) => ind(&g, cfg.merge("ind-check", a)?),
        Command::IpSearch(a) => ip(&g, cfg.merge("ip-search", a)?),
        Command::Averages(a) => averages(&g, cfg.merge("averages", a)?),
        Command::ValidateGroup(a) => validate_group(&g, cfg.merge("validate-group", a)?),
    })
}

fn emit(g: &Globals, text: &str) -> Result<()> {
    match &g.out {
        Some(p) => write_file(p, text),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn json_report(command: &str, config: &Value, result: Value) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "version": VERSION,
        "command": command,
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn csv_header(command: &str, config: &Value) -> String {
    format!(
        "# nildyn {VERSION}\n# schema_version: {SCHEMA_VERSION}\n# command: {command}\n# config: {}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn require<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Precondition(format!("missing required parameter '{what}'")))
}

fn require_seed(v: Option<u64>) -> Result<u64> {
    v.ok_or_else(|| Error::Precondition("search commands need an explicit --seed".into()))
}

fn system_of(desc: &Option<String>) -> Result<BuiltSystem> {
    build_system(&require(desc.clone(), "system")?)
}

fn parse_sets(sys: &BuiltSystem, specs: &[String]) -> Result<SetTuple> {
    if specs.is_empty() {
        return Ok(SetTuple::binary_cylinders());
    }
    let sets = specs
        .iter()
        .map(|s| {
            let s = s.trim();
            if let Some(rest) = s.strip_prefix("ball:") {
                let (c, r) = rest
                    .rsplit_once('/')
                    .ok_or_else(|| Error::Parse(format!("ball '{s}' needs center/radius")))?;
                let radius: f64 = r.trim().parse().map_err(|_| Error::Parse(format!("bad radius in '{s}'")))?;
                Ok(TargetSet::Ball { center: sys.parse_point(c)?, radius })
            } else {
                let (w, a) = s.split_once('@').unwrap_or((s, "0"));
                let word: Vec<u8> = w
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse(format!("bad cylinder '{s}'"))))
                    .collect::<Result<_>>()?;
                let anchor: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad anchor in '{s}'")))?;
                Ok(TargetSet::cylinder(&word, anchor))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SetTuple::new(sets)
}

fn simulate(g: &Globals, a: SimulateArgs) -> Result<i32> {
    let sys = system_of(&a.system)?;
    let seed = a.seed.unwrap_or(0);
    let steps = a.steps.unwrap_or(100);
    let every = a.every.unwrap_or(1).max(1);
    let start = match &a.start {
        Some(s) => sys.parse_point(s)?,
        None => sys.samples(seed, 0, 1).remove(0),
    };
    let config = json!({
        "system": sys.descriptor, "start": start.render(), "steps": steps, "every": every, "seed": seed,
    });
    let mut p = start;
    let mut rows = Vec::new();
    for n in 0..=steps {
        if n > 0 {
            p = sys.handle.step(&p);
        }
        if n % every == 0 {
            let mut row = vec![n.to_string()];
            match p.coords() {
                Some(c) => row.extend(c.iter().map(|x| format!("{x:.17}"))),
                None => row.push(p.render()),
            }
            rows.push(row);
        }
    }
    let width = rows[0].len() - 1;
    let names: Vec<String> = match p.coords() {
        Some(_) => (0..width).map(|i| format!("x{i}")).collect(),
        None => vec!["state".into()],
    };
    let mut header = vec!["n"];
    header.extend(names.iter().map(String::as_str));
    emit(g, &(csv_header("simulate", &config) + &csv_rows(&header, rows)?))?;
    Ok(EXIT_OK)
}

fn complexity(g: &Globals, a: ComplexityArgs) -> Result<i32> {
    let sys = system_of(&a.system)?;
    let eps = a.eps.unwrap_or(0.1);
    let ns = if a.ns.is_empty() { geometric_ns(a.n_max.unwrap_or(100)) } else { a.ns.clone() };
    let budget = SearchBudget {
        grid_resolution: a.grid.clone(),
        max_points: a.max_points.unwrap_or(SearchBudget::default().max_points),
        seed: a.seed.unwrap_or(0),
        ..SearchBudget::default()
    };
    let config = json!({
        "system": sys.descriptor, "eps": eps, "ns": ns, "grid": budget.grid_resolution,
        "max_points": budget.max_points, "seed": budget.seed,
    });
    let curve = complexity_curve(&sys.handle, &ns, eps, &budget)?;
    if a.json {
        emit(g, &json_report("complexity", &config, serde_json::to_value(&curve).unwrap()))?;
        return Ok(EXIT_OK);
    }
    let mut head = csv_header("complexity", &config);
    head += &format!("# label: {}\n", curve.label);
    match (&curve.fit, &curve.fit_error) {
        (Some(f), _) => {
            head += &format!(
                "# fit: {} parameter={} residual={}\n",
                f.class.as_str(),
                f.parameter,
                f.residual
            )
        }
        (None, Some(e)) => head += &format!("# fit: none ({e})\n"),
        _ => {}
    }
    let rows = curve
        .records
        .iter()
        .map(|r| vec![r.n.to_string(), r.r_estimate.to_string(), r.net_size.to_string(), r.grid.clone()]);
    emit(g, &(head + &csv_rows(&["n", "r_estimate", "net_size", "grid"], rows)?))?;
    Ok(EXIT_OK)
}

fn search_budget(seed: u64, max_n_values: Option<usize>, max_candidates: Option<usize>) -> SearchBudget {
    let d = SearchBudget::default();
    SearchBudget {
        max_n_values: max_n_values.unwrap_or(d.max_n_values),
        max_candidates: max_candidates.unwrap_or(d.max_candidates),
        ..SearchBudget::with_seed(seed)
    }
}

fn rp(g: &Globals, a: RpArgs) -> Result<i32> {
    let seed = require_seed(a.seed)?;
    let sys = system_of(&a.system)?;
    let x = sys.parse_point(&require(a.x.clone(), "x")?)?;
    let y = sys.parse_point(&require(a.y.clone(), "y")?)?;
    let d = a.d.unwrap_or(1);
    let delta = require(a.delta, "delta")?;
    let budget = search_budget(seed, a.max_n_values, a.max_candidates);
    let config = json!({
        "system": sys.descriptor, "x": x.render(), "y": y.render(), "d": d, "delta": delta,
        "seed": seed, "max_n_values": budget.max_n_values, "max_candidates": budget.max_candidates,
    });
    let out = rp_test(&sys.handle, &x, &y, d, delta, &budget)?;
    emit(g, &json_report("rp-test", &config, serde_json::to_value(&out).unwrap()))?;
    Ok(match out {
        RpOutcome::Found { .. } => EXIT_OK,
        RpOutcome::NotFound { .. } => EXIT_BUDGET,
    })
}

fn cube(g: &Globals, a: CubeArgs) -> Result<i32> {
    let seed = require_seed(a.seed)?;
    let sys = system_of(&a.system)?;
    let x1 = sys.parse_point(&require(a.x1.clone(), "x1")?)?;
    let x2 = sys.parse_point(&require(a.x2.clone(), "x2")?)?;
    let d = a.d.unwrap_or(1);
    let delta = require(a.delta, "delta")?;
    let budget = search_budget(seed, a.max_n_values, a.max_candidates);
    let config = json!({
        "system": sys.descriptor, "x1": x1.render(), "x2": x2.render(), "d": d, "delta": delta,
        "seed": seed, "max_n_values": budget.max_n_values, "max_candidates": budget.max_candidates,
    });
    let rep = cube_criterion(&sys.handle, &x1, &x2, d, delta, &budget)?;
    emit(g, &json_report("cube-criterion", &config, serde_json::to_value(&rep).unwrap()))?;
    Ok(if rep.all_realized() { EXIT_OK } else { EXIT_BUDGET })
}

fn ind(g: &Globals, a: IndArgs) -> Result<i32> {
    let seed = require_seed(a.seed)?;
    let sys = system_of(&a.system)?;
    let tuple = parse_sets(&sys, &a.sets)?;
    let f = match (a.f.is_empty(), a.gens.is_empty()) {
        (false, true) => a.f.clone(),
        (true, false) => fs_set(&a.gens)?.elements,
        _ => return Err(Error::Precondition("give exactly one of --f and --gens".into())),
    };
    let budget = SearchBudget {
        max_points: a.max_points.unwrap_or(SearchBudget::default().max_points),
        ..SearchBudget::with_seed(seed)
    };
    let config = json!({
        "system": sys.descriptor, "sets": tuple, "f": f, "max_points": budget.max_points, "seed": seed,
    });
    let rep = check_independence(&sys.handle, &tuple, &f, &budget)?;
    emit(g, &json_report("ind-check", &config, serde_json::to_value(&rep).unwrap()))?;
    Ok(EXIT_OK)
}

fn ip(g: &Globals, a: IpArgs) -> Result<i32> {
    let seed = require_seed(a.seed)?;
    let sys = system_of(&a.system)?;
    let tuple = parse_sets(&sys, &a.sets)?;
    let ms = if a.m.is_empty() { vec![1, 2, 3, 4] } else { a.m.clone() };
    let bounds = if a.bound.is_empty() { vec![50] } else { a.bound.clone() };
    let budget = SearchBudget {
        max_points: a.max_points.unwrap_or(SearchBudget::default().max_points),
        ..SearchBudget::with_seed(seed)
    };
    let config = json!({
        "system": sys.descriptor, "sets": tuple, "m": ms, "bound": bounds,
        "max_points": budget.max_points, "seed": seed,
    });
    let mut rows = ip_ladder(&sys.handle, &tuple, &ms, &bounds, &budget)?;
    let summary: Vec<Value> = ladder_summary(&rows)
        .into_iter()
        .map(|(b, m)| json!({ "bound": b, "largest_m_found": m }))
        .collect();
    let mut rows_json = Vec::new();
    for r in rows.iter_mut() {
        let mut v = serde_json::to_value(&*r).unwrap();
        if !g.timing {
            v.as_object_mut().unwrap().remove("wall_time_s");
        }
        rows_json.push(v);
    }
    emit(g, &json_report("ip-search", &config, json!({ "rows": rows_json, "summary": summary })))?;
    Ok(EXIT_OK)
}

fn averages(g: &Globals, a: AvgArgs) -> Result<i32> {
    let sys = system_of(&a.system)?;
    let seed = a.seed.unwrap_or(0);
    let n_max = a.n_max.unwrap_or(100_000);
    let obs_specs = if a.observables.is_empty() {
        vec!["cos:0".to_string(), "sin:0".into(), "coord:0".into()]
    } else {
        a.observables.clone()
    };
    let observables: Vec<Observable> = obs_specs.iter().map(|s| Observable::parse(s)).collect::<Result<_>>()?;
    let starts: Vec<Point> = if a.starts.is_empty() {
        sys.samples(seed, 0, 3)
    } else {
        a.starts.iter().map(|s| sys.parse_point(s)).collect::<Result<_>>()?
    };
    let eta = a.eta.unwrap_or(0.01);
    let config = json!({
        "system": sys.descriptor, "observables": obs_specs, "starts": starts.iter().map(Point::render).collect::<Vec<_>>(),
        "n_max": n_max, "probe": a.probe, "eta": eta, "seed": seed,
    });
    if a.probe {
        let rep = unique_ergodicity_probe(&sys.handle, &observables, &starts, n_max, eta)?;
        emit(g, &json_report("averages", &config, serde_json::to_value(&rep).unwrap()))?;
        return Ok(EXIT_OK);
    }
    let grid = power_grid(n_max);
    let jobs: Vec<(usize, usize)> =
        (0..observables.len()).flat_map(|o| (0..starts.len()).map(move |s| (o, s))).collect();
    use rayon::prelude::*;
    let traces = jobs
        .par_iter()
        .map(|&(o, s)| birkhoff(&sys.handle, &observables[o], &starts[s], &grid))
        .collect::<Result<Vec<_>>>()?;
    let mut head = csv_header("averages", &config);
    for t in &traces {
        head += &format!(
            "# oscillation: observable={} start={} tail_from={} value={}\n",
            t.observable, t.start, t.tail_from, t.oscillation
        );
    }
    let rows = traces.iter().flat_map(|t| {
        t.averages
            .iter()
            .map(move |(n, v)| vec![t.observable.clone(), t.start.clone(), n.to_string(), v.to_string()])
    });
    emit(g, &(head + &csv_rows(&["observable", "start", "N", "A_N"], rows)?))?;
    Ok(EXIT_OK)
}

fn validate_group(g: &Globals, a: GroupArgs) -> Result<i32> {
    let name = a.spec.clone().unwrap_or_else(|| "heisenberg3".into());
    let samples = a.samples.unwrap_or(10_000);
    let seed = a.seed.unwrap_or(0);
    let spec = NilGroupSpec::resolve(&name)?;
    let t0 = Instant::now();
    let check = spec.check_law(samples, seed);
    let mut text = format!(
        "group {}: dimension {}, step {}\nstructure: ok\n",
        spec.label(),
        spec.dimension,
        spec.step
    );
    text += &format!(
        "axioms over {} samples (seed {seed}, tolerance {:e}):\n  identity      {:.3e}\n  inverse       {:.3e}\n  associativity {:.3e}\n  triangularity {:.3e}\n",
        check.samples, check.tolerance, check.max_identity_err, check.max_inverse_err, check.max_assoc_err,
        check.max_triangularity_err
    );
    if g.timing {
        text += &format!("wall time: {:.3}s\n", t0.elapsed().as_secs_f64());
    }
    text += if check.passed { "result: PASS\n" } else { "result: FAIL\n" };
    emit(g, &text)?;
    Ok(if check.passed { EXIT_OK } else { EXIT_CONFIG })
}
