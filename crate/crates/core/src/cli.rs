//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for configuration and parameter errors, 2
//! for failures while running.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::basis::{build_multi_index_set, MultiIndexSet};
use crate::bench::{
    generate_design, run_study, study_basis, success_rate_table, summarize, write_records_csv,
    write_success_rates_csv, write_summary_csv, DesignParams, StudyConfig,
};
use crate::error::Error;
use crate::models::{problem_by_name, ELECTRODE_FULL_FREQUENCIES};
use crate::rng::derive_seed;
use crate::sampling::Scheme;
use crate::solver::SolverChoice;
use crate::surrogate::GpceModel;

/// Names of the bundled study configurations.
pub const PRESETS: [&str; 4] = [
    "ishigami-fig3",
    "rosenbrock-fig5",
    "lpp-fig7",
    "electrode-fig9-reduced",
];

/// TOML text of a bundled preset.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "ishigami-fig3" => Some(include_str!("../configs/ishigami-fig3.toml")),
        "rosenbrock-fig5" => Some(include_str!("../configs/rosenbrock-fig5.toml")),
        "lpp-fig7" => Some(include_str!("../configs/lpp-fig7.toml")),
        "electrode-fig9-reduced" => Some(include_str!("../configs/electrode-fig9-reduced.toml")),
        _ => None,
    }
}

/// A failed command with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

// Parameter-type library errors are usage errors, everything else is a
// runtime failure.
fn classify(e: Error) -> CliError {
    match e {
        Error::Config(_)
        | Error::InvalidInput(_)
        | Error::UnknownProblem(_)
        | Error::UnknownScheme(_)
        | Error::PoolExhausted { .. } => CliError::Usage(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gpce",
    version,
    about = "Sparse polynomial chaos surrogates and sampling benchmarks"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a convergence study and write CSV reports.
    Bench(BenchArgs),
    /// Generate a design and write it as CSV.
    Sample(SampleArgs),
    /// Fit a surrogate of a registered problem.
    Fit(FitArgs),
    /// Evaluate a saved surrogate at points from a CSV file.
    Predict(PredictArgs),
    /// Print mean and standard deviation of a saved surrogate.
    Moments(MomentsArgs),
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Study configuration (TOML).
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled configuration, one of ishigami-fig3, rosenbrock-fig5, lpp-fig7, electrode-fig9-reduced.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the repetition count.
    #[arg(long)]
    repetitions: Option<usize>,
    /// Use all 1000 electrode frequencies instead of the reduced set.
    #[arg(long)]
    electrode_full: bool,
}

#[derive(Debug, Args)]
struct BasisArgs {
    /// Registered problem supplying dimension and basis.
    #[arg(long)]
    problem: Option<String>,
    /// Maximum total order of the basis.
    #[arg(long)]
    order: Option<usize>,
    /// Maximum interaction order of the basis.
    #[arg(long)]
    interaction: Option<usize>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Greedy pool size per requested point.
    #[arg(long, default_value_t = 10)]
    pool_factor: usize,
    /// Candidates of the pool-optimal LHS designs.
    #[arg(long, default_value_t = 100)]
    lhs_pool: usize,
    /// Border-stratum fraction of SC-ESE.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
}

impl DesignArgs {
    fn params(&self) -> DesignParams {
        DesignParams {
            pool_factor: self.pool_factor,
            lhs_pool: self.lhs_pool,
            sc_alpha: self.alpha,
        }
    }
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    scheme: String,
    /// Number of points.
    #[arg(short, long)]
    m: usize,
    /// Dimension (taken from --problem when given).
    #[arg(short, long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    basis: BasisArgs,
    #[command(flatten)]
    design: DesignArgs,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "random")]
    scheme: String,
    /// Number of model evaluations.
    #[arg(short, long)]
    m: usize,
    /// l1 (LARS-Lasso) or l2 (least squares).
    #[arg(long, default_value = "l1")]
    solver: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the model (JSON).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    interaction: Option<usize>,
    /// Report the NRMSD on this many random test points.
    #[arg(long, default_value_t = 0)]
    n_test: usize,
    #[command(flatten)]
    design: DesignArgs,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Saved model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// CSV of physical input points, one per row.
    #[arg(long)]
    points: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[arg(long)]
    model: PathBuf,
}

/// Parse `args` (including the program name), run the command and return
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    let result = match cli.command {
        Command::Bench(a) => bench(a).map(|_| ()),
        Command::Sample(a) => sample(a),
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Moments(a) => moments(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// What a bench run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub status: String,
    pub error: Option<String>,
    pub problem: String,
    pub master_seed: u64,
    pub jobs: usize,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    /// Canonical TOML of the configuration that ran.
    pub config: String,
}

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUCCESS_RATES_FILE: &str = "success_rates.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

fn bench(a: BenchArgs) -> Result<RunManifest, CliError> {
    let text = match (&a.config, &a.preset) {
        (Some(path), _) => fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| {
                usage(format!(
                    "unknown preset `{name}` (expected one of {})",
                    PRESETS.join(", ")
                ))
            })?
            .to_string(),
        (None, None) => return Err(usage("either --config or --preset is required")),
    };
    let mut config = StudyConfig::from_toml_str(&text).map_err(usage)?;
    if let Some(seed) = a.seed {
        config.master_seed = seed;
    }
    if let Some(r) = a.repetitions {
        config.repetitions = r;
    }
    if a.electrode_full && config.problem.starts_with("electrode") {
        config.problem = format!("electrode{ELECTRODE_FULL_FREQUENCIES}");
    }
    config.validate().map_err(usage)?;
    cmd_bench(&config, &a.out, a.jobs)
}

/// Run a study into `out_dir`: records, summary, success rates and a
/// manifest. Outputs written before a failure are kept and the manifest
/// records the error.
pub fn cmd_bench(
    config: &StudyConfig,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<RunManifest, CliError> {
    config.validate().map_err(usage)?;
    problem_by_name(&config.problem).map_err(usage)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let started = Instant::now();
    let mut manifest = RunManifest {
        tool: "gpce".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        status: "running".into(),
        error: None,
        problem: config.problem.clone(),
        master_seed: config.master_seed,
        jobs,
        started_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        elapsed_seconds: 0.0,
        outputs: Vec::new(),
        config: config.to_toml_string(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(runtime)?;
    let result = pool.install(|| write_reports(config, out_dir, &mut manifest.outputs));
    manifest.elapsed_seconds = started.elapsed().as_secs_f64();
    match &result {
        Ok(()) => manifest.status = "ok".into(),
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
        }
    }
    manifest.outputs.push(MANIFEST_FILE.into());
    let json = serde_json::to_string_pretty(&manifest).map_err(runtime)?;
    fs::write(out_dir.join(MANIFEST_FILE), json + "\n").map_err(runtime)?;
    result.map(|()| manifest)
}

fn write_reports(
    config: &StudyConfig,
    out_dir: &Path,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    let create = |name: &str| {
        fs::File::create(out_dir.join(name))
            .map(io::BufWriter::new)
            .map_err(|e| runtime(format!("cannot write {name}: {e}")))
    };
    let records = run_study(config).map_err(runtime)?;
    write_records_csv(create(RECORDS_FILE)?, &records).map_err(runtime)?;
    outputs.push(RECORDS_FILE.into());

    let rows = summarize(
        &records,
        &config.thresholds,
        &config.baseline,
        config.repetitions,
    )
    .map_err(runtime)?;
    write_summary_csv(create(SUMMARY_FILE)?, &rows).map_err(runtime)?;
    outputs.push(SUMMARY_FILE.into());

    let rates = success_rate_table(&records, &config.thresholds, config.repetitions);
    write_success_rates_csv(create(SUCCESS_RATES_FILE)?, &rates).map_err(runtime)?;
    outputs.push(SUCCESS_RATES_FILE.into());
    Ok(())
}

fn resolve_basis(
    b: &BasisArgs,
    dim: Option<usize>,
) -> Result<(usize, Option<MultiIndexSet>), CliError> {
    if let Some(name) = &b.problem {
        let problem = problem_by_name(name).map_err(usage)?;
        if let Some(d) = dim.filter(|&d| d != problem.dim()) {
            return Err(usage(format!(
                "--dim {d} disagrees with {name} (d = {})",
                problem.dim()
            )));
        }
        let basis = build_multi_index_set(
            problem.dim(),
            b.order.unwrap_or(problem.order()),
            b.interaction.unwrap_or(problem.interaction_order()),
        );
        return Ok((problem.dim(), Some(basis)));
    }
    let d = dim.ok_or_else(|| usage("--dim or --problem is required"))?;
    let basis = match b.order {
        Some(p) => Some(MultiIndexSet::new(d, p, b.interaction.unwrap_or(d)).map_err(usage)?),
        None => None,
    };
    Ok((d, basis))
}

fn sample(a: SampleArgs) -> Result<(), CliError> {
    let scheme: Scheme = a.scheme.parse().map_err(usage)?;
    let (d, basis) = resolve_basis(&a.basis, a.dim)?;
    if scheme.needs_basis() && basis.is_none() {
        return Err(usage(format!(
            "scheme {scheme} needs a basis: give --problem, or --order with --dim"
        )));
    }
    if a.m == 0 {
        return Err(usage("-m must be at least 1"));
    }
    let set = generate_design(scheme, a.m, d, basis.as_ref(), a.seed, &a.design.params())
        .map_err(classify)?;

    let mut header: Vec<String> = (1..=d).map(|k| format!("u{k}")).collect();
    if set.is_weighted() {
        header.push("weight".into());
    }
    if set.selection_order().is_some() {
        header.push("pool_index".into());
    }
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    w.write_record(&header).map_err(runtime)?;
    for i in 0..set.len() {
        let mut row: Vec<String> = set.point(i).iter().map(|v| v.to_string()).collect();
        if set.is_weighted() {
            row.push(set.weight(i).to_string());
        }
        if let Some(order) = set.selection_order() {
            row.push(order[i].to_string());
        }
        w.write_record(&row).map_err(runtime)?;
    }
    w.flush().map_err(runtime)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| {
                runtime(format!("cannot write {}: {e}", p.display()))
            })?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn fit(a: FitArgs) -> Result<(), CliError> {
    let problem = problem_by_name(&a.problem).map_err(usage)?;
    let scheme: Scheme = a.scheme.parse().map_err(usage)?;
    let solver: SolverChoice = a.solver.parse().map_err(usage)?;
    if a.m < 2 {
        return Err(usage("-m must be at least 2"));
    }
    let mut config = StudyConfig::new(&a.problem, Vec::new(), Vec::new());
    config.order = a.order;
    config.interaction_order = a.interaction;
    let basis = study_basis(&config, &problem);
    let set = generate_design(
        scheme,
        a.m,
        problem.dim(),
        Some(&basis),
        a.seed,
        &a.design.params(),
    )
    .map_err(classify)?;
    let y = problem
        .evaluate_unit_points(set.points())
        .map_err(runtime)?;
    let model = GpceModel::fit(&set, &y, &basis, problem.spec(), &solver).map_err(runtime)?;
    model.save(&a.out).map_err(runtime)?;
    eprintln!(
        "fitted {} on {} {} points: {} basis functions, {} QOIs",
        problem.name(),
        a.m,
        scheme,
        basis.len(),
        model.n_qoi()
    );
    if a.n_test > 0 {
        let report = model
            .nrmsd(
                |x| problem.evaluate(x),
                a.n_test,
                derive_seed(a.seed, 0x7e57),
            )
            .map_err(runtime)?;
        eprintln!("nrmsd {:.6e}", report.mean);
    }
    Ok(())
}

/// Rows of a numeric CSV; a first row that does not parse is a header.
fn read_points(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(usage)?;
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if i == 0 && fields.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        rows.push(fields);
    }
    Ok(rows)
}

fn predict(a: PredictArgs) -> Result<(), CliError> {
    let model =
        GpceModel::load(&a.model).map_err(|e| usage(format!("{}: {e}", a.model.display())))?;
    let d = model.spec().dim();
    let rows = read_points(&a.points)?;
    let q = model.n_qoi();
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    let header: Vec<String> = (0..q).map(|k| format!("y{k}")).collect();
    w.write_record(&header).map_err(runtime)?;
    let mut failures = 0;
    for (i, fields) in rows.iter().enumerate() {
        let parsed: Result<Vec<f64>, CliError> = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| usage(format!("`{f}` is not a number")))
            })
            .collect();
        let result = parsed.and_then(|x| {
            if x.len() != d {
                return Err(usage(format!(
                    "expected {d} coordinates, found {}",
                    x.len()
                )));
            }
            model
                .predict(&x)
                .map(|m| m.row(0).iter().copied().collect::<Vec<f64>>())
                .map_err(runtime)
        });
        match result {
            Ok(p) => {
                let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                w.write_record(&row).map_err(runtime)?;
            }
            Err(e) => {
                failures += 1;
                eprintln!("row {}: {e}", i + 1);
                w.write_record(vec!["-"; q]).map_err(runtime)?;
            }
        }
    }
    w.flush().map_err(runtime)?;
    if failures > 0 {
        return Err(runtime(format!(
            "{failures} of {} rows could not be evaluated",
            rows.len()
        )));
    }
    Ok(())
}

fn moments(a: MomentsArgs) -> Result<(), CliError> {
    let model =
        GpceModel::load(&a.model).map_err(|e| usage(format!("{}: {e}", a.model.display())))?;
    let mut out = io::stdout().lock();
    writeln!(out, "qoi,mean,std").map_err(runtime)?;
    for (k, (m, s)) in model.moments().into_iter().enumerate() {
        writeln!(out, "{k},{m},{s}").map_err(runtime)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_validate() {
        for name in PRESETS {
            let c = StudyConfig::from_toml_str(preset(name).unwrap()).unwrap();
            assert_eq!(c.repetitions, 30, "{name}");
            assert_eq!(c.baseline, "random");
        }
        assert!(preset("nope").is_none());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["gpce", "bench"]), 1);
        assert_eq!(run(["gpce", "frobnicate"]), 1);
        assert_eq!(run(["gpce", "bench", "--preset", "nope"]), 1);
        assert_eq!(
            run(["gpce", "sample", "--scheme", "co", "-m", "4", "--dim", "2"]),
            1
        );
        assert_eq!(
            run(["gpce", "sample", "--scheme", "lhs-foo", "-m", "4", "--dim", "2"]),
            1
        );
        assert_eq!(run(["gpce", "--help"]), 0);
    }

    #[test]
    fn classification() {
        assert_eq!(classify(Error::UnknownScheme("x".into())).exit_code(), 1);
        assert_eq!(classify(Error::EmptySampleSet).exit_code(), 2);
    }
}
