//! `delaysde`: spectral analysis, simulation and inference for linear
//! stochastic delay differential equations.

mod fmt;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use delaysde::inference::{self, InferenceError};
use delaysde::limit::{self, LimitError};
use delaysde::mc::{self, ExperimentConfig, McError};
use delaysde::sdde::{self, SimError};
use delaysde::spectral::{classify, CharacteristicModel, Regime, RootSearchConfig, SpectralError};
use delaysde::{InitialSegment, Region, SamplePath, SeedRecord};

use report::{
    BaselineSummary, InferReport, McCellSummary, McLimitSummary, McSummary, SpectralReport,
};

#[derive(Parser)]
#[command(name = "delaysde", version, about = "Delay SDE spectral analysis, simulation and inference")]
struct Cli {
    /// Overrides every seed taken from flags or config files.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a model: roots, residue coefficients, (v*, m*), regime.
    Analyze(AnalyzeArgs),
    /// Simulate one path of the delay equation to CSV.
    Simulate(SimulateArgs),
    /// Estimate θ and α from a simulated path CSV.
    Infer(InferArgs),
    /// Simulate the delay-free limit system from an `analyze` report.
    Limit(LimitArgs),
    /// Monte Carlo comparison of α̂_T against the limit MLE.
    Mc(McArgs),
    /// Near-unit-root AR(1) baseline against its Ornstein-Uhlenbeck limit.
    Baseline(BaselineArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Model JSON: {"measure": {...}, "theta": x}.
    #[arg(long)]
    model: PathBuf,
    /// Report output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    re_min: Option<f64>,
    #[arg(long)]
    re_max: Option<f64>,
    #[arg(long)]
    im_max: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Horizon T.
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial segment: "const:VALUE" or "poly:c0,c1,..".
    #[arg(long, default_value = "const:0")]
    x0: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    /// Path CSV produced by `simulate` (columns t,x,y,dw).
    #[arg(long)]
    path: PathBuf,
    /// Base point θ for the local parametrisation; defaults to the model θ.
    #[arg(long)]
    theta_base: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LimitArgs {
    /// Spectral report JSON produced by `analyze`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct McArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    /// Local drift h in β = 1 + h/n.
    #[arg(long, default_value_t = 0.0)]
    h: f64,
    /// AR(1) sample length.
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Euler step of the Ornstein-Uhlenbeck limit paths.
    #[arg(long, default_value_t = 1e-3)]
    ou_dt: f64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Exit with code 4 when the two-sample KS distance exceeds this.
    #[arg(long)]
    ks_max: Option<f64>,
}

/// Failure category driving the exit code: 2 config, 3 numerical, 4 threshold.
enum CliError {
    Config(String),
    Numerical(String),
    Threshold(String),
}

impl CliError {
    fn report(&self) -> (u8, &str) {
        match self {
            CliError::Config(m) => (2, m),
            CliError::Numerical(m) => (3, m),
            CliError::Threshold(m) => (4, m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::LengthMismatch(..) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<LimitError> for CliError {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::InvalidStep(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::InvalidConfig(_) | McError::NotUnstable(_) => {
                CliError::Config(e.to_string())
            }
            McError::Spectral(inner) => CliError::Numerical(inner.to_string()),
            McError::EmptySample => CliError::Numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args, cli.seed),
        Command::Infer(args) => cmd_infer(args),
        Command::Limit(args) => cmd_limit(args, cli.seed),
        Command::Mc(args) => cmd_mc(args, cli.seed),
        Command::Baseline(args) => cmd_baseline(args, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, message) = e.report();
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

/// DELAYSDE_THREADS caps the rayon worker count.
fn configure_threads() {
    if let Ok(v) = std::env::var("DELAYSDE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<CharacteristicModel, CliError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid model JSON {}: {e}", path.display())))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, text)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_x0(spec: &str) -> Result<InitialSegment, CliError> {
    if let Some(v) = spec.strip_prefix("const:") {
        let value: f64 = v
            .parse()
            .map_err(|_| CliError::Config(format!("invalid x0 constant: {v}")))?;
        return Ok(InitialSegment::Constant { value });
    }
    if let Some(cs) = spec.strip_prefix("poly:") {
        let coeffs: Result<Vec<f64>, _> = cs.split(',').map(str::parse).collect();
        return coeffs
            .map(|coeffs| InitialSegment::Polynomial { coeffs })
            .map_err(|_| CliError::Config(format!("invalid x0 polynomial: {cs}")));
    }
    Err(CliError::Config(format!(
        "unrecognised x0 spec '{spec}'; use const:VALUE or poly:c0,c1,..."
    )))
}

// ---------------------------------------------------------------- analyze

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let mut region = Region::default_for(&model);
    if let Some(v) = args.re_min {
        region.re_min = v;
    }
    if let Some(v) = args.re_max {
        region.re_max = v;
    }
    if let Some(v) = args.im_max {
        region.im_max = v;
    }
    let summary = classify(&model, region, &RootSearchConfig::default())?;
    let report = SpectralReport::from_summary(&summary);
    write_out(args.out.as_ref(), &fmt::to_json_string(&report)?)
}

// ---------------------------------------------------------------- simulate

fn path_to_csv(path: &SamplePath, measure: &delaysde::SignedMeasure) -> String {
    let mut out = String::from("t,x,y,dw\n");
    let n_r = path.delay_steps();
    for (i, x) in path.history.iter().enumerate().take(n_r) {
        let t = (i as f64 - n_r as f64) * path.dt;
        out.push_str(&format!("{},{},,\n", fmt::float(t), fmt::float(*x)));
    }
    let steps = path.steps();
    for (k, x) in path.values.iter().enumerate() {
        let t = k as f64 * path.dt;
        let y = sdde::delayed_functional(path, measure, k);
        let dw = if k < steps {
            path.noise.as_ref().map(|n| fmt::float(n[k])).unwrap_or_default()
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt::float(t),
            fmt::float(*x),
            fmt::float(y),
            dw
        ));
    }
    out
}

fn cmd_simulate(args: &SimulateArgs, seed_override: Option<u64>) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let x0 = parse_x0(&args.x0)?;
    let seed = SeedRecord::root(seed_override.unwrap_or(args.seed));
    let path = sdde::simulate_sdde(&model, &x0, args.horizon, args.dt, seed)?;
    let csv = path_to_csv(&path, &model.measure);
    fs::write(&args.out, csv)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(())
}

// ---------------------------------------------------------------- infer

fn parse_path_csv(text: &str) -> Result<SamplePath, CliError> {
    let bad = |m: String| CliError::Config(format!("invalid path CSV: {m}"));
    let mut rows: Vec<(f64, f64, Option<f64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if !line.trim_start().starts_with('t') {
                return Err(bad("missing t,x,y,dw header".into()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 2 {
            return Err(bad(format!("line {}: expected at least t,x", i + 1)));
        }
        let t: f64 = cols[0].parse().map_err(|_| bad(format!("line {}: bad t", i + 1)))?;
        let x: f64 = cols[1].parse().map_err(|_| bad(format!("line {}: bad x", i + 1)))?;
        let dw = cols.get(3).and_then(|s| s.parse::<f64>().ok());
        rows.push((t, x, dw));
    }
    if rows.len() < 3 {
        return Err(bad("need at least three grid rows".into()));
    }
    let dt = rows[1].0 - rows[0].0;
    if dt <= 0.0 {
        return Err(bad("time column must increase".into()));
    }
    for w in rows.windows(2) {
        if ((w[1].0 - w[0].0) - dt).abs() > 1e-9 {
            return Err(bad("grid is not uniform".into()));
        }
    }
    let zero_idx = rows
        .iter()
        .position(|r| r.0.abs() <= 1e-9)
        .ok_or_else(|| bad("no grid point at t = 0".into()))?;
    let history: Vec<f64> = rows[..=zero_idx].iter().map(|r| r.1).collect();
    let values: Vec<f64> = rows[zero_idx..].iter().map(|r| r.1).collect();
    if values.len() < 2 {
        return Err(bad("no observations after t = 0".into()));
    }
    let steps = values.len() - 1;
    let noise: Vec<f64> = rows[zero_idx..zero_idx + steps]
        .iter()
        .filter_map(|r| r.2)
        .collect();
    let horizon = rows.last().expect("nonempty").0;
    Ok(SamplePath {
        dt,
        horizon,
        history,
        values,
        noise: (noise.len() == steps).then_some(noise),
        seed: None,
    })
}

fn cmd_infer(args: &InferArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let text = read_to_string(&args.path)?;
    let path = parse_path_csv(&text)?;
    let expected_delay = model.measure.delay_r();
    let got_delay = path.delay_steps() as f64 * path.dt;
    if (got_delay - expected_delay).abs() > 1e-6 * (1.0 + expected_delay) {
        return Err(CliError::Config(format!(
            "path history spans {got_delay} but the model delay is {expected_delay}"
        )));
    }
    let theta_base = args.theta_base.unwrap_or(model.theta);
    let base_model = CharacteristicModel::new(model.measure.clone(), theta_base);
    let summary = classify(
        &base_model,
        Region::default_for(&base_model),
        &RootSearchConfig::default(),
    )?;
    if summary.regime != Regime::Unstable {
        return Err(CliError::Numerical(format!(
            "base model classifies as {:?}; the local scaling needs an unstable base (v* = 0)",
            summary.regime
        )));
    }
    let stats = inference::sufficient_stats(&path, &model.measure);
    let r_scale = inference::scaling_r(&summary, path.horizon)?;
    let theta_hat = inference::mle_theta(&stats)?;
    let alpha_hat = inference::mle_alpha(&stats, theta_base, r_scale)?;
    let (delta, j) = inference::delta_j(&stats, theta_base, r_scale);
    let report = InferReport {
        I1: stats.i1,
        I2: stats.i2,
        I3: stats.i3,
        theta_hat,
        r_scale,
        alpha_hat,
        delta,
        j,
        theta_base,
        horizon: path.horizon,
    };
    write_out(args.out.as_ref(), &fmt::to_json_string(&report)?)
}

// ---------------------------------------------------------------- limit

fn cmd_limit(args: &LimitArgs, seed_override: Option<u64>) -> Result<(), CliError> {
    let text = read_to_string(&args.report)?;
    let report: SpectralReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid report JSON {}: {e}", args.report.display())))?;
    if report.regime != Regime::Unstable {
        return Err(CliError::Numerical(format!(
            "report regime is {:?}; the limit system exists at an unstable point",
            report.regime
        )));
    }
    let roots = report.dominant_roots();
    let m_star = report
        .m_star
        .ok_or_else(|| CliError::Numerical("report lacks m*".into()))?;
    if roots.is_empty() {
        return Err(CliError::Numerical("report has no dominant roots".into()));
    }
    let master = seed_override.unwrap_or(args.seed);
    if args.reps == 0 {
        return Err(CliError::Config("reps must be positive".into()));
    }
    let mut csv = String::from("rep,delta,j,alpha_hat\n");
    for rep in 0..args.reps {
        let paths: Result<Vec<_>, LimitError> = roots
            .iter()
            .enumerate()
            .map(|(j, root)| {
                let seed = SeedRecord::new(
                    master,
                    SeedRecord::stream_id(mc::streams::LIMIT, j as u32),
                    rep as u64,
                );
                limit::simulate_limit_system(root, m_star, args.alpha, args.dt, seed)
            })
            .collect();
        let paths = paths?;
        let stats = limit::limit_delta_j(&paths);
        let alpha_col = match limit::limit_mle_alpha(&paths) {
            Ok(mle) => fmt::float(mle.alpha_hat),
            Err(LimitError::DegenerateDenominator(_)) => String::new(),
            Err(e) => return Err(e.into()),
        };
        csv.push_str(&format!(
            "{rep},{},{},{}\n",
            fmt::float(stats.delta),
            fmt::float(stats.j),
            alpha_col
        ));
    }
    fs::write(&args.out, csv)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(())
}

// ---------------------------------------------------------------- mc

fn sample_csv(values: &[f64], column: &str) -> String {
    let mut out = format!("{column}\n");
    for v in values {
        out.push_str(&fmt::float(*v));
        out.push('\n');
    }
    out
}

fn failures_csv(failures: &[mc::RepFailure]) -> String {
    let mut out = String::from("replication,message\n");
    for f in failures {
        out.push_str(&format!("{},{}\n", f.replication, f.message.replace(',', ";")));
    }
    out
}

fn horizon_label(t: f64) -> String {
    format!("{t}").replace('.', "_")
}

fn cmd_mc(args: &McArgs, seed_override: Option<u64>) -> Result<(), CliError> {
    let text = read_to_string(&args.config)?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config JSON {}: {e}", args.config.display())))?;
    if let Some(seed) = seed_override {
        config.master_seed = seed;
    }
    let search = RootSearchConfig::default();
    config.validate(&search)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", args.out_dir.display())))?;

    let limit_start = Instant::now();
    let limit_cell = mc::mc_limit_alpha_hat(&config, &search)?;
    let limit_runtime = limit_start.elapsed().as_secs_f64();
    fs::write(
        args.out_dir.join("alpha_hat_limit.csv"),
        sample_csv(&limit_cell.sample.values, "alpha_hat"),
    )?;
    if !limit_cell.failures.is_empty() {
        fs::write(
            args.out_dir.join("failures_limit.csv"),
            failures_csv(&limit_cell.failures),
        )?;
    }

    let mut cells = Vec::new();
    let mut violated = false;
    let ks_max = config.thresholds.and_then(|t| t.ks_max);
    let cell_start = Instant::now();
    let horizon_cells = mc::mc_alpha_hat(&config, &search)?;
    let total_runtime = cell_start.elapsed().as_secs_f64();
    let per_cell = total_runtime / horizon_cells.len().max(1) as f64;
    for (t, cell) in &horizon_cells {
        let label = horizon_label(*t);
        fs::write(
            args.out_dir.join(format!("alpha_hat_T{label}.csv")),
            sample_csv(&cell.sample.values, "alpha_hat"),
        )?;
        if !cell.failures.is_empty() {
            fs::write(
                args.out_dir.join(format!("failures_T{label}.csv")),
                failures_csv(&cell.failures),
            )?;
        }
        let ks = mc::ks_two_sample(&cell.sample, &limit_cell.sample)?;
        if let Some(bound) = ks_max {
            if ks > bound {
                violated = true;
            }
        }
        cells.push(McCellSummary {
            t: *t,
            n: config.replications,
            ks,
            failures: cell.failures.len(),
            runtime_s: per_cell,
        });
    }
    let summary = McSummary {
        cells,
        limit: McLimitSummary {
            n: limit_cell.sample.count + limit_cell.failures.len(),
            failures: limit_cell.failures.len(),
            runtime_s: limit_runtime,
        },
        master_seed: config.master_seed,
        alpha: config.alpha,
        ks_max,
        threshold_violated: violated,
    };
    fs::write(args.out_dir.join("summary.json"), fmt::to_json_string(&summary)?)?;
    if violated {
        return Err(CliError::Threshold(format!(
            "a KS cell exceeded the configured bound {}",
            ks_max.expect("violation implies a bound")
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- baseline

fn cmd_baseline(args: &BaselineArgs, seed_override: Option<u64>) -> Result<(), CliError> {
    let master = seed_override.unwrap_or(args.seed);
    let start = Instant::now();
    let out = mc::ar1_baseline(args.h, args.n, args.reps, master, args.ou_dt)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", args.out_dir.display())))?;
    fs::write(
        args.out_dir.join("h_hat.csv"),
        sample_csv(&out.h_hat.sample.values, "h_hat"),
    )?;
    fs::write(
        args.out_dir.join("ou_mle.csv"),
        sample_csv(&out.ou_mle.sample.values, "ou_mle"),
    )?;
    if !out.h_hat.failures.is_empty() {
        fs::write(
            args.out_dir.join("failures_ar1.csv"),
            failures_csv(&out.h_hat.failures),
        )?;
    }
    if !out.ou_mle.failures.is_empty() {
        fs::write(
            args.out_dir.join("failures_ou.csv"),
            failures_csv(&out.ou_mle.failures),
        )?;
    }
    let ks = mc::ks_two_sample(&out.h_hat.sample, &out.ou_mle.sample)?;
    let violated = args.ks_max.map(|b| ks > b).unwrap_or(false);
    let summary = BaselineSummary {
        h: args.h,
        n: args.n,
        replications: args.reps,
        ks,
        failures_ar1: out.h_hat.failures.len(),
        failures_ou: out.ou_mle.failures.len(),
        runtime_s: start.elapsed().as_secs_f64(),
        ks_max: args.ks_max,
        threshold_violated: violated,
    };
    fs::write(args.out_dir.join("baseline_summary.json"), fmt::to_json_string(&summary)?)?;
    if violated {
        return Err(CliError::Threshold(format!(
            "KS = {ks} exceeds the bound {}",
            args.ks_max.expect("violation implies a bound")
        )));
    }
    Ok(())
}
