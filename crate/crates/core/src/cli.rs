//! Command-line front end: experiment registry, JSON configs and CSV/JSON output.

use crate::acceptance::{self, DEFAULT_SEED};
use crate::counterexample::{
    cap_escape_check, choose_r, demonstrate_no_closed_geodesic, neck_period, neck_period_bound, pairwise_intersections,
};
use crate::error::GeoError;
use crate::flow::{disk_with_2pi_n, evolve, long_arc_test, shortest_boundary_arc, FlowControls};
use crate::metric::{build_metric, ChartSpec, MetricChart, Profile};
use crate::period::{critical_circles, find_closed_geodesic, index_bound, PeriodProblem};
use crate::polygon::{polygon_geodesic, PolygonKind};
use crate::sweepout::{
    corner_half_argmax, disk_minimax_sequence, formula_maxima, halving_sequence, triangle_minimax_sequence,
};
use crate::toric::{adjusted_metric, cp2_reference_numbers, ToricSpec};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

/// Environment variable overriding `--out`.
pub const OUT_ENV: &str = "GEOFLOW_OUT";

#[derive(Parser, Debug)]
#[command(name = "geoflow", version, about = "Closed geodesics on incomplete surfaces: experiments and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overridden by GEOFLOW_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Numeric tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of flow frames to store.
    #[arg(long, global = true)]
    pub frames: Option<usize>,
    /// Config override `key=value`, value parsed as JSON or taken as a string.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Period function Ω_c of a surface of revolution.
    Periods,
    /// Embedded closed geodesic on a product polygon.
    Polygon,
    /// Flow a loop enclosing total curvature 2π.
    Flow,
    /// Corner-loop sweepouts of the Clifford disk.
    SweepoutDisk,
    /// Similar-triangle sweepouts of the projective plane chart.
    SweepoutTriangle,
    /// Toric metric of a Delzant polygon.
    Toric,
    /// Capped neck without closed geodesics.
    Counterexample,
    /// Long-arc condition of a chart.
    LongArc,
    /// Acceptance table.
    PaperNumbers,
}

impl Command {
    pub fn id(self) -> &'static str {
        match self {
            Command::Periods => "periods",
            Command::Polygon => "polygon",
            Command::Flow => "flow",
            Command::SweepoutDisk => "sweepout-disk",
            Command::SweepoutTriangle => "sweepout-triangle",
            Command::Toric => "toric",
            Command::Counterexample => "counterexample",
            Command::LongArc => "long-arc",
            Command::PaperNumbers => "paper-numbers",
        }
    }
}

/// Experiment settings read from `--config` and `--set`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub metric: Option<ChartSpec>,
    /// Profile name or expression in `r`.
    pub f: Option<String>,
    pub r_max: Option<f64>,
    pub polygon: Option<String>,
    /// Preset name or `{"edges": ..., "h": ...}`.
    pub toric: Option<Value>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub frames: Option<usize>,
    pub samples: Option<usize>,
    pub center: Option<[f64; 2]>,
    pub vertices: Option<usize>,
    pub cfl: Option<f64>,
    pub max_time: Option<f64>,
    pub c_values: Option<Vec<f64>>,
    pub a0: Option<f64>,
    pub steps: Option<usize>,
    pub margin: Option<f64>,
    pub grid: Option<[usize; 2]>,
    pub pairs: Option<usize>,
    pub criteria: Option<Vec<u8>>,
}

/// Error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: msg.into() }
    }

    pub fn computation(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_COMPUTATION, message: msg.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        let code = match e {
            GeoError::UnknownChart(_) | GeoError::InvalidParams(_) | GeoError::Parse { .. } => EXIT_VALIDATION,
            _ => EXIT_COMPUTATION,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::computation(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::computation(format!("csv: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fully resolved settings for one run.
#[derive(Clone, Debug)]
pub struct Settings {
    pub command: Command,
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub tol: Option<f64>,
    pub frames: Option<usize>,
}

impl Settings {
    /// Merge config file, `--set` overrides, flags and the environment.
    pub fn resolve(cli: &Cli, env_out: Option<PathBuf>) -> CliResult<Settings> {
        let mut raw = match &cli.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| CliError::validation(format!("config {}: {e}", p.display())))?
            }
            None => json!({}),
        };
        let obj = raw.as_object_mut().ok_or_else(|| CliError::validation("config must be a JSON object"))?;
        for kv in &cli.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::validation(format!("--set needs KEY=VALUE, got `{kv}`")))?;
            let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            obj.insert(k.to_string(), v);
        }
        let config: ExperimentConfig =
            serde_json::from_value(raw).map_err(|e| CliError::validation(format!("config: {e}")))?;
        if let Some(id) = &config.experiment {
            if id != cli.command.id() {
                return Err(CliError::validation(format!(
                    "config is for experiment `{id}` but `{}` was requested",
                    cli.command.id()
                )));
            }
        }
        let out = env_out
            .or_else(|| cli.out.clone())
            .or_else(|| config.out.clone())
            .unwrap_or_else(|| PathBuf::from("geoflow-out"));
        let s = Settings {
            command: cli.command,
            seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
            tol: cli.tol.or(config.tol),
            frames: cli.frames.or(config.frames),
            out,
            config,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> CliResult<()> {
        let c = &self.config;
        let positive = [("tol", self.tol), ("cfl", c.cfl), ("max_time", c.max_time), ("margin", c.margin), ("a0", c.a0), ("r_max", c.r_max)];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(CliError::validation(format!("`{name}` must be positive, got {v}")));
                }
            }
        }
        let counts = [("samples", c.samples), ("vertices", c.vertices), ("steps", c.steps), ("frames", self.frames), ("pairs", c.pairs)];
        for (name, v) in counts {
            if v == Some(0) {
                return Err(CliError::validation(format!("`{name}` must be at least 1")));
            }
        }
        if let Some(ids) = &c.criteria {
            if let Some(bad) = ids.iter().find(|i| !(1..=11).contains(*i)) {
                return Err(CliError::validation(format!("criterion {bad} is not in 1..=11")));
            }
        }
        Ok(())
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// Entry point used by the binary; returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    let env_out = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let settings = match Settings::resolve(&cli, env_out) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return e.code;
        }
    };
    match run(&settings) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

/// Run one experiment and write its artifacts; returns the exit code.
pub fn run(s: &Settings) -> CliResult<i32> {
    std::fs::create_dir_all(&s.out)?;
    match s.command {
        Command::Periods => periods(s),
        Command::Polygon => polygon(s),
        Command::Flow => flow(s),
        Command::SweepoutDisk => sweepout_disk(s),
        Command::SweepoutTriangle => sweepout_triangle(s),
        Command::Toric => toric(s),
        Command::Counterexample => counterexample(s),
        Command::LongArc => long_arc(s),
        Command::PaperNumbers => paper_numbers(s),
    }
}

/// Seventeen significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json(s: &Settings, name: &str, v: &impl Serialize) -> CliResult<PathBuf> {
    let path = s.out.join(name);
    let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::computation(format!("json: {e}")))?;
    text.push('\n');
    std::fs::write(&path, text)?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// CSV cell.
enum Cell {
    N(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::N(x) => fmt_num(*x),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<Cell>], quiet: bool) -> CliResult<PathBuf> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(Cell::text))?;
    }
    w.flush()?;
    if !quiet {
        println!("wrote {}", path.display());
    }
    Ok(path)
}

fn profile(s: &Settings) -> CliResult<Profile> {
    let c = &s.config;
    if let Some(f) = &c.f {
        return Ok(Profile::from_name_or_expr(f, c.r_max)?);
    }
    if let Some(m) = &c.metric {
        if m.id == "revolution" {
            if let Some(f) = m.params.get("f").and_then(Value::as_str) {
                return Ok(Profile::from_name_or_expr(f, m.params.get("r_max").and_then(Value::as_f64))?);
            }
        }
        return Err(CliError::validation(format!("metric `{}` is not a surface of revolution", m.id)));
    }
    Ok(Profile::Clifford)
}

fn chart(s: &Settings) -> CliResult<MetricChart> {
    let spec = match (&s.config.metric, &s.config.f) {
        (Some(m), _) => m.clone(),
        (None, Some(f)) => {
            let mut spec = ChartSpec::new("revolution").with("f", f.as_str()).with("coords", "cartesian");
            if let Some(r) = s.config.r_max {
                spec = spec.with("r_max", r);
            }
            spec
        }
        (None, None) => ChartSpec::new("revolution").with("f", "clifford").with("coords", "cartesian"),
    };
    Ok(build_metric(&spec)?)
}

fn periods(s: &Settings) -> CliResult<i32> {
    let p = profile(s)?;
    let pb = PeriodProblem::new(p.clone())?;
    let circles = critical_circles(&p)?;
    let limits = pb.limits()?;
    let extrapolated = pb.extrapolated_limits()?;
    let n = s.config.samples.unwrap_or(64);
    let tol = s.tol_or(1e-10);
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n {
        let c = pb.c_crit * i as f64 / (n + 1) as f64;
        let q = pb.period_tol(c, tol)?;
        rows.push(vec![Cell::N(q.c), Cell::N(q.omega), Cell::N(q.r1), Cell::N(q.r2)]);
    }
    write_csv(&s.out, "periods.csv", &["c", "omega", "r1", "r2"], &rows, false)?;
    let summary = json!({
        "experiment": "periods",
        "profile": p.name(),
        "r_crit": pb.r_crit,
        "c_crit": pb.c_crit,
        "limits": limits,
        "extrapolated_limits": extrapolated,
        "critical_circles": circles,
        "index": index_bound(&p).ok(),
        "closed_search": find_closed_geodesic(&p).ok(),
    });
    write_json(s, "periods.json", &summary)?;
    Ok(EXIT_OK)
}

fn polygon(s: &Settings) -> CliResult<i32> {
    let kind = PolygonKind::parse(s.config.polygon.as_deref().unwrap_or("square"))?;
    let g = polygon_geodesic(kind)?;
    let rows: Vec<_> = g.curve.vertices.iter().map(|p| vec![Cell::N(p[0]), Cell::N(p[1])]).collect();
    write_csv(&s.out, "polygon_loop.csv", &["u", "v"], &rows, false)?;
    write_json(s, "polygon.json", &g)?;
    Ok(EXIT_OK)
}

fn flow(s: &Settings) -> CliResult<i32> {
    let chart = chart(s)?;
    let center = s.config.center.unwrap_or_else(|| chart.center());
    if !chart.in_domain(center) {
        return Err(CliError::validation(format!("center {center:?} is outside the chart domain")));
    }
    let curve = disk_with_2pi_n(&chart, center, s.config.vertices.unwrap_or(128))?;
    let max_time = s.config.max_time.unwrap_or(20.0);
    let controls = FlowControls {
        max_time,
        cfl: s.config.cfl.unwrap_or(0.2),
        frame_dt: s.frames.map(|n| max_time / n as f64),
        ..Default::default()
    };
    let o = evolve(&chart, &curve, &controls)?;
    let rows: Vec<_> = o
        .history
        .iter()
        .map(|h| {
            vec![
                Cell::N(h.t),
                Cell::N(h.length),
                Cell::N(h.total_k),
                Cell::N(h.enclosed.unwrap_or(f64::NAN)),
                Cell::N(h.max_k),
                Cell::N(h.locus_gap),
            ]
        })
        .collect();
    write_csv(&s.out, "flow_history.csv", &["t", "length", "total_k", "enclosed", "max_k", "locus_gap"], &rows, false)?;
    if !o.frames.is_empty() {
        let dir = s.out.join("frames");
        std::fs::create_dir_all(&dir)?;
        let mut index = Vec::new();
        for (i, (t, c)) in o.frames.iter().enumerate() {
            let name = format!("frame_{i:04}.csv");
            let rows: Vec<_> = c.vertices.iter().map(|p| vec![Cell::N(p[0]), Cell::N(p[1])]).collect();
            write_csv(&dir, &name, &["u", "v"], &rows, true)?;
            index.push(vec![Cell::I(i as i64), Cell::N(*t), Cell::S(name)]);
        }
        write_csv(&dir, "index.csv", &["frame", "t", "file"], &index, false)?;
    }
    let rows: Vec<_> = o.curve.vertices.iter().map(|p| vec![Cell::N(p[0]), Cell::N(p[1])]).collect();
    write_csv(&s.out, "flow_final.csv", &["u", "v"], &rows, false)?;
    write_json(s, "flow.json", &json!({ "experiment": "flow", "chart": chart.id, "center": center, "outcome": o }))?;
    Ok(EXIT_OK)
}

fn sweepout_disk(s: &Settings) -> CliResult<i32> {
    let cs = s.config.c_values.clone().unwrap_or_else(|| vec![0.85, 0.9, 0.95, 0.99, 0.999]);
    let seq = disk_minimax_sequence(&cs)?;
    let rows: Vec<_> = seq
        .iter()
        .map(|d| {
            vec![
                Cell::N(d.c),
                Cell::N(d.r0),
                Cell::N(d.k_inner),
                Cell::N(d.p_outer),
                Cell::N(d.max_length),
                Cell::N(d.argmax[0]),
                Cell::N(d.argmax[1]),
                Cell::B(d.disjoint),
            ]
        })
        .collect();
    let header = ["c", "r0", "k_inner", "p_outer", "max_length", "argmax_r", "argmax_theta", "disjoint"];
    write_csv(&s.out, "sweepout_disk.csv", &header, &rows, false)?;
    let mut leaves = Vec::new();
    for (j, d) in seq.iter().enumerate() {
        for (i, leaf) in d.leaves(21, 64).iter().enumerate() {
            for p in leaf {
                leaves.push(vec![Cell::I(j as i64), Cell::I(i as i64), Cell::N(p[0]), Cell::N(p[1])]);
            }
        }
    }
    write_csv(&s.out, "sweepout_disk_leaves.csv", &["sweepout", "leaf", "u", "v"], &leaves, false)?;
    let (golden, stationary) = corner_half_argmax()?;
    write_json(
        s,
        "sweepout_disk.json",
        &json!({ "experiment": "sweepout-disk", "argmax_r": golden, "argmax_r_stationary": stationary, "sweepouts": seq }),
    )?;
    Ok(EXIT_OK)
}

fn sweepout_triangle(s: &Settings) -> CliResult<i32> {
    let a = halving_sequence(s.config.a0.unwrap_or(0.05), s.config.steps.unwrap_or(6));
    let seq = triangle_minimax_sequence(&a)?;
    let rows: Vec<_> = seq
        .iter()
        .map(|t| {
            vec![
                Cell::N(t.a),
                Cell::N(t.k_outer),
                Cell::N(t.big_l),
                Cell::N(t.max_length),
                Cell::N(t.argmax[0]),
                Cell::N(t.argmax[1]),
                Cell::B(t.disjoint),
                Cell::B(t.nested),
            ]
        })
        .collect();
    let header = ["a", "k_outer", "big_l", "max_length", "argmax_p", "argmax_q", "disjoint", "nested"];
    write_csv(&s.out, "sweepout_triangle.csv", &header, &rows, false)?;
    let mut path = Vec::new();
    for (j, t) in seq.iter().enumerate() {
        for p in &t.path {
            path.push(vec![Cell::I(j as i64), Cell::N(p[0]), Cell::N(p[1])]);
        }
    }
    write_csv(&s.out, "sweepout_triangle_paths.csv", &["sweepout", "p", "q"], &path, false)?;
    write_json(
        s,
        "sweepout_triangle.json",
        &json!({ "experiment": "sweepout-triangle", "formula_maxima": formula_maxima()?, "sweepouts": seq }),
    )?;
    Ok(EXIT_OK)
}

fn toric(s: &Settings) -> CliResult<i32> {
    let spec = ToricSpec::from_json(s.config.toric.as_ref().unwrap_or(&json!("cp2")))?;
    let poly = spec.build()?;
    let problems = poly.validate();
    if !problems.is_empty() {
        write_json(s, "toric.json", &json!({ "experiment": "toric", "delzant_violations": problems }))?;
        return Err(CliError::validation(format!("polygon is not Delzant: {}", problems.join("; "))));
    }
    let chart = adjusted_metric(&poly)?;
    let vs = poly.vertices();
    let (lo, hi) = vs.iter().fold(([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]), |(lo, hi), v| {
        ([lo[0].min(v[0]), lo[1].min(v[1])], [hi[0].max(v[0]), hi[1].max(v[1])])
    });
    let n = s.config.samples.unwrap_or(41).max(2);
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let p = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / (n - 1) as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / (n - 1) as f64,
            ];
            if !chart.in_domain(p) || chart.locus_distance(p) < 1e-6 {
                continue;
            }
            let k = chart.gaussian_curvature(p).unwrap_or(f64::NAN);
            let d = poly.det_times_prod(p).unwrap_or(f64::NAN);
            rows.push(vec![Cell::N(p[0]), Cell::N(p[1]), Cell::N(k), Cell::N(d)]);
        }
    }
    write_csv(&s.out, "toric_grid.csv", &["x", "y", "curvature", "det_times_prod"], &rows, false)?;
    let long = long_arc_test(&chart)?;
    let reference = if spec.name.as_deref() == Some("cp2") && spec.h.is_none() && spec.extra_edges.is_empty() {
        Some(cp2_reference_numbers(s.tol_or(1e-8))?)
    } else {
        None
    };
    write_json(
        s,
        "toric.json",
        &json!({
            "experiment": "toric",
            "vertices": vs,
            "delzant_violations": problems,
            "long_arc": long,
            "cp2": reference,
        }),
    )?;
    Ok(EXIT_OK)
}

fn counterexample(s: &Settings) -> CliResult<i32> {
    let r = choose_r(s.config.margin.unwrap_or(1.0))?;
    let mut rows = Vec::new();
    for i in 1..100 {
        let c = i as f64 / 100.0;
        rows.push(vec![Cell::N(c), Cell::N(neck_period(c)?), Cell::N(neck_period_bound(c))]);
    }
    write_csv(&s.out, "counterexample_periods.csv", &["c", "omega", "bound"], &rows, false)?;
    let n = s.config.samples.unwrap_or(1000);
    let caps = cap_escape_check(r, false, n, s.seed)?;
    let smooth_caps = cap_escape_check(r, true, n, s.seed)?;
    let pairs = pairwise_intersections(r, s.config.pairs.unwrap_or(200), s.seed)?;
    let demo = demonstrate_no_closed_geodesic(r, s.config.grid.unwrap_or([12, 12]))?;
    let rows: Vec<_> =
        demo.flow.outcome.curve.vertices.iter().map(|p| vec![Cell::N(p[0]), Cell::N(p[1])]).collect();
    write_csv(&s.out, "counterexample_flow_final.csv", &["u", "v"], &rows, false)?;
    write_json(
        s,
        "counterexample.json",
        &json!({
            "experiment": "counterexample",
            "r": r,
            "caps": caps,
            "smooth_caps": smooth_caps,
            "pairs": pairs,
            "no_closed_geodesic": demo,
        }),
    )?;
    Ok(EXIT_OK)
}

fn long_arc(s: &Settings) -> CliResult<i32> {
    let chart = chart(s)?;
    let arc = shortest_boundary_arc(&chart)?;
    let rep = long_arc_test(&chart)?;
    write_json(s, "long_arc.json", &json!({ "experiment": "long-arc", "chart": chart.id, "arc": arc, "report": rep }))?;
    Ok(EXIT_OK)
}

fn paper_numbers(s: &Settings) -> CliResult<i32> {
    let ids = s.config.criteria.clone().unwrap_or_else(|| (1..=11).collect());
    let mut results = Vec::new();
    for id in ids {
        let r = acceptance::run(id, s.seed)?;
        println!("{}", r.line());
        results.push(r);
    }
    let mut rows = Vec::new();
    for r in &results {
        for c in &r.checks {
            rows.push(vec![Cell::I(r.id as i64), Cell::S(c.name.clone()), Cell::N(c.value), Cell::S(c.target.clone()), Cell::B(c.pass)]);
        }
    }
    write_csv(&s.out, "acceptance.csv", &["criterion", "check", "value", "target", "pass"], &rows, false)?;
    write_json(s, "acceptance.json", &json!({ "experiment": "paper-numbers", "seed": s.seed, "criteria": results }))?;
    Ok(if results.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_ACCEPTANCE })
}
