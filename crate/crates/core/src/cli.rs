//! Command-line front end.
//!
//! Exit codes: 0 on success (or a passing experiment), 2 when an experiment
//! or report fails its criteria, 1 on usage or computational errors.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{
    canonical_json, read_report, run_experiment, write_report, ExperimentConfig, ExperimentReport, ReportFormat,
    EXPERIMENTS,
};
use crate::geometry::{FacetGauge, GeneralVPolytope, Projection, SymVPolytope};
use crate::io::{load_body, write_body, Body};
use crate::random::{gluskin_polytope, net_sample};
use crate::ratio::{loewner_normalize_with_map, vr_upper_affine, vr_upper_with, VrOptions};
use crate::tol::MAX_EXACT_DIM;
use crate::volume::{exact_volume, mc_volume, Membership, VolumeEstimate};

/// Environment variable naming the default output directory for experiments.
pub const OUT_DIR_ENV: &str = "VRLAB_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "vrlab", version, about = "Convex bodies, volume ratios and projection experiments")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a body file.
    Gen(GenArgs),
    /// Volume of a body.
    Volume(VolumeArgs),
    /// Upper bound on the volume ratio of A over B.
    Vr(VrArgs),
    /// Normalize a body.
    Normalize(NormalizeArgs),
    /// Greedy net of rank-k projections.
    Net(NetArgs),
    /// Run or list experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Summarize a saved experiment report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Gluskin,
    Cross,
    Cube,
    Polygon,
    Simplex,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Dimension (vertex count for `polygon`).
    #[arg(long)]
    n: usize,
    /// Number of Gaussian generators (`gluskin` only).
    #[arg(long = "N")]
    big_n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent. A `<out>.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VolumeArgs {
    body: PathBuf,
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling radius; defaults to the body's circumradius bound.
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Debug, Args)]
struct VrArgs {
    outer: PathBuf,
    inner: PathBuf,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frames for the outer and inner bodies.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    projections: Option<Vec<PathBuf>>,
}

#[derive(Debug, Args)]
struct NormalizeArgs {
    body: PathBuf,
    #[arg(long, required = true)]
    loewner: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NetArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes the selected frames here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    /// Run one experiment and write `<name>.json` and `<name>.csv`.
    Run(RunArgs),
    /// List the registered experiments.
    List,
}

#[derive(Debug, Args)]
struct RunArgs {
    name: String,
    /// JSON file with `params` (and optionally `seed`).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; falls back to $VRLAB_OUT_DIR, then the current directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    report: PathBuf,
}

pub fn dispatch(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Error::param("threads", "must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(cli.command)),
            Err(e) => Err(Error::Precondition(format!("thread pool: {e}"))),
        },
        None => execute(cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Volume(a) => volume(a),
        Command::Vr(a) => vr(a),
        Command::Normalize(a) => normalize(a),
        Command::Net(a) => net(a),
        Command::Experiment(ExperimentCommand::List) => {
            for name in EXPERIMENTS {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Experiment(ExperimentCommand::Run(a)) => experiment(a),
        Command::Report(a) => report(a),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn require_file(p: &Path) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(Error::io(p, std::io::Error::new(std::io::ErrorKind::NotFound, "no such file")))
    }
}

fn gen(a: GenArgs) -> Result<i32> {
    if a.big_n.is_some() && !matches!(a.kind, Kind::Gluskin) {
        return Err(Error::param("N", "only meaningful with --kind gluskin"));
    }
    let mut meta = json!({ "n": a.n, "seed": a.seed });
    let body = match a.kind {
        Kind::Gluskin => {
            let big_n = a.big_n.ok_or_else(|| Error::param("N", "required for --kind gluskin"))?;
            let s = gluskin_polytope(a.n, big_n, a.seed)?;
            meta["kind"] = json!("gluskin");
            meta["N"] = json!(big_n);
            meta["omega0"] = json!(s.omega0);
            Body::Sym(s.into_body())
        }
        Kind::Cross => {
            meta["kind"] = json!("cross");
            Body::Sym(SymVPolytope::cross_polytope(a.n))
        }
        Kind::Cube => {
            meta["kind"] = json!("cube");
            Body::Sym(SymVPolytope::cube(a.n)?)
        }
        Kind::Polygon => {
            meta["kind"] = json!("polygon");
            Body::Sym(SymVPolytope::regular_polygon(a.n)?)
        }
        Kind::Simplex => {
            meta["kind"] = json!("simplex");
            Body::General(GeneralVPolytope::standard_simplex(a.n))
        }
    };
    emit(&write_body(&body), a.out.as_deref())?;
    if let Some(out) = &a.out {
        let mut side = out.clone().into_os_string();
        side.push(".meta.json");
        emit(&canonical_json(&meta), Some(Path::new(&side)))?;
    }
    Ok(0)
}

fn estimate_json(e: &VolumeEstimate) -> Result<Value> {
    Ok(serde_json::to_value(e)?)
}

fn volume(a: VolumeArgs) -> Result<i32> {
    require_file(&a.body)?;
    let body = load_body(&a.body)?;
    let est = if a.mc {
        mc(&body, a.radius, a.samples, a.seed)?
    } else {
        match &body {
            Body::Sym(b) => exact_volume(b)?,
            Body::General(b) => exact_volume(b)?,
            Body::H(b) => exact_volume(b)?,
            Body::Frame(_) => return Err(Error::InvalidBody("a frame has no volume".into())),
        }
    };
    emit(&canonical_json(&estimate_json(&est)?), None)?;
    Ok(0)
}

fn mc(body: &Body, radius: Option<f64>, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    fn run<M: Membership>(m: &M, radius: Option<f64>, samples: u64, seed: u64) -> Result<VolumeEstimate> {
        let r = radius
            .or_else(|| m.circumradius())
            .ok_or_else(|| Error::param("radius", "required for this body kind"))?;
        mc_volume(m, r, samples, seed)
    }
    match body {
        Body::Sym(b) if b.dim() <= MAX_EXACT_DIM => run(&FacetGauge::new(b)?, radius, samples, seed),
        Body::Sym(b) => run(b, radius, samples, seed),
        Body::H(h) => {
            let r = radius.unwrap_or_else(|| {
                // ‖Ax‖_∞ ≤ 1 gives ‖x‖ ≤ √m / σ_min(A).
                let sv = h.rows().singular_values();
                (h.len() as f64).sqrt() / sv.min()
            });
            run(h, Some(r), samples, seed)
        }
        _ => Err(Error::InvalidBody(format!("Monte Carlo volume is not available for `{}` records", body.kind()))),
    }
}

fn frame(path: &Path) -> Result<Projection> {
    require_file(path)?;
    match load_body(path)? {
        Body::Frame(p) => Ok(p),
        other => Err(Error::InvalidBody(format!("{}: expected a frame record, found `{}`", path.display(), other.kind()))),
    }
}

fn vr(a: VrArgs) -> Result<i32> {
    require_file(&a.outer)?;
    require_file(&a.inner)?;
    let frames = match &a.projections {
        Some(v) => Some((frame(&v[0])?, frame(&v[1])?)),
        None => None,
    };
    let outer = match load_body(&a.outer)? {
        Body::Sym(b) => b,
        other => return Err(Error::InvalidBody(format!("outer body must be `symV`, found `{}`", other.kind()))),
    };
    let inner = load_body(&a.inner)?;
    let opts = VrOptions::new(a.restarts, a.seed);
    let r = match (inner, frames) {
        (Body::Sym(l), Some((p, q))) => crate::ratio::vr_projected_with(&outer, &p, &l, &q, &opts)?,
        (Body::Sym(l), None) => vr_upper_with(&outer, &l, &opts)?,
        (Body::General(w), None) => vr_upper_affine(&outer, &w, &opts)?,
        (other, _) => {
            return Err(Error::InvalidBody(format!("inner body of kind `{}` is not supported here", other.kind())))
        }
    };
    let record = json!({
        "value": r.value,
        "det": r.det(),
        "slack": r.feasibility_slack,
        "converged": r.converged,
        "restarts": r.restarts,
    });
    emit(&canonical_json(&record), None)?;
    Ok(0)
}

fn normalize(a: NormalizeArgs) -> Result<i32> {
    require_file(&a.body)?;
    let body = match load_body(&a.body)? {
        Body::Sym(b) => b,
        other => return Err(Error::InvalidBody(format!("normalization needs a `symV` body, found `{}`", other.kind()))),
    };
    let (normalized, _) = loewner_normalize_with_map(&body)?;
    emit(&write_body(&Body::Sym(normalized)), a.out.as_deref())?;
    Ok(0)
}

fn net(a: NetArgs) -> Result<i32> {
    let s = net_sample(a.n, a.k, a.eps, a.budget, a.seed)?;
    if let Some(out) = &a.out {
        let text: String = s.projections.iter().map(|p| write_body(&Body::Frame(p.clone()))).collect();
        emit(&text, Some(out))?;
    }
    let record = json!({
        "size": s.projections.len(),
        "covering_radius": s.covering_radius,
        "test_points": s.test_points,
        "eps": a.eps,
    });
    emit(&canonical_json(&record), None)?;
    Ok(0)
}

fn experiment(a: RunArgs) -> Result<i32> {
    let mut config = match &a.config {
        Some(p) => {
            require_file(p)?;
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let mut v: Value = serde_json::from_str(&text)?;
            if let Some(obj) = v.as_object_mut() {
                obj.entry("name").or_insert_with(|| json!(a.name));
            }
            let c: ExperimentConfig = serde_json::from_value(v)?;
            if c.name != a.name {
                return Err(Error::param("name", format!("config names `{}` but `{}` was requested", c.name, a.name)));
            }
            c
        }
        None => ExperimentConfig::new(&a.name, 0),
    };
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let dir = a
        .out
        .or_else(|| config.out_path.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let report = run_experiment(&config)?;
    write_report(&report, ReportFormat::Json, &dir.join(format!("{}.json", a.name)))?;
    write_report(&report, ReportFormat::Csv, &dir.join(format!("{}.csv", a.name)))?;
    let timing = dir.join(format!("{}.timing.json", a.name));
    emit(&canonical_json(&json!({ "wall_time": report.wall_time })), Some(&timing))?;
    print_criteria(&report);
    Ok(if report.pass { 0 } else { 2 })
}

fn print_criteria(r: &ExperimentReport) {
    for c in &r.criteria {
        println!(
            "{} {}: {} {} {} ({})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            crate::io::format_f64(c.observed),
            c.relation,
            crate::io::format_f64(c.threshold),
            c.statement
        );
    }
    println!("{}: {}", r.config.name, if r.pass { "pass" } else { "fail" });
}

fn report(a: ReportArgs) -> Result<i32> {
    require_file(&a.report)?;
    let r = read_report(&a.report)?;
    print_criteria(&r);
    Ok(if r.pass { 0 } else { 2 })
}
