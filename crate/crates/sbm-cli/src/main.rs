//! Command-line front end: exact skew Brownian simulation, skewness
//! estimation, the limit-law tables, the Monte Carlo studies, the zero-skew
//! test, and the two-diffusivity habitat decision.
//!
//! Every run resolves its parameters from defaults, then an optional
//! `--config run.json` manifest, then explicit flags (flags win), and stamps
//! the resolved configuration into the header of whatever file it writes.
//! Given the same seed the outputs are byte-identical for any worker count.

use clap::{Args, Parser, Subcommand};
use sbm_core::htest::{hypothesis_test, Calibration, VarianceTable};
use sbm_core::io;
use sbm_core::limit::{draw_upsilon, mu_table};
use sbm_core::studies;
use sbm_core::{
    habitat, mle, simulate_path, Error, GridPath, Result, RngStream, SbmParams,
};
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sbm", version, about = "Skew Brownian motion: simulation and inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// RNG seed (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON manifest with the same parameters as the flags; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory that relative output paths are resolved against
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Output file (default: a command-specific name in the output directory)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a skew Brownian path on a uniform grid; writes a path CSV
    Simulate(SimulateArgs),
    /// Estimate the skewness of a path file; writes a report JSON
    Estimate(PathArg),
    /// Tabulate the normalization constants mu_1..mu_k with error bounds
    MuTable(MuTableArgs),
    /// Draw samples of the limit variable Upsilon; writes a sample CSV
    LimitSample(LimitSampleArgs),
    /// Replicated estimation studies
    Study {
        #[command(subcommand)]
        study: StudyCommand,
    },
    /// Two-sided test of zero skewness on a path file; writes an outcome JSON
    Test(TestArgs),
    /// Simulate a habitat diffusion with distinct diffusivities per side
    HabitatSimulate(HabitatSimulateArgs),
    /// Identify the habitat generator (L or A) from a path file
    HabitatDecide(PathArg),
}

#[derive(Args)]
struct SimulateArgs {
    /// Skewness in [-1, 1]
    #[arg(long)]
    theta: Option<f64>,
    /// Starting point, >= 0
    #[arg(long)]
    x0: Option<f64>,
    /// Time horizon
    #[arg(long)]
    t: Option<f64>,
    /// Number of grid steps
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct PathArg {
    /// Input path CSV (columns i,t,x)
    #[arg(long)]
    path: PathBuf,
}

#[derive(Args)]
struct MuTableArgs {
    /// Largest constant index
    #[arg(long)]
    k_max: Option<usize>,
}

#[derive(Args)]
struct LimitSampleArgs {
    /// Number of draws
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Subcommand)]
enum StudyCommand {
    /// Spread between the MLE and its first-order expansion per n
    Table1(GridStudyArgs),
    /// Distribution match of n^{1/4} theta_n against Upsilon and a normal
    Table2(Table2Args),
    /// Power-law fit of std(theta_n) against n
    Rate(GridStudyArgs),
    /// Power-law fit of Var(alpha_n) against n
    VarScaling(GridStudyArgs),
    /// Histogram of the test statistic under theta versus under the null
    Power(PowerArgs),
}

#[derive(Args)]
struct GridStudyArgs {
    /// Comma-separated grid sizes
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Replications per grid size
    #[arg(long)]
    reps: Option<usize>,
    /// Also write the per-replication records to this CSV
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args)]
struct Table2Args {
    #[command(flatten)]
    grid: GridStudyArgs,
    /// Size of the Upsilon reference pool
    #[arg(long)]
    pool: Option<usize>,
}

#[derive(Args)]
struct PowerArgs {
    /// Skewness of the simulated alternative
    #[arg(long)]
    theta: Option<f64>,
    /// Grid size
    #[arg(long)]
    n: Option<usize>,
    /// Replications
    #[arg(long)]
    reps: Option<usize>,
    /// Histogram bins over [-1.5, 1.5]
    #[arg(long)]
    bins: Option<usize>,
}

#[derive(Args)]
struct TestArgs {
    /// Input path CSV
    #[arg(long)]
    path: PathBuf,
    /// Two-sided test level in (0, 1)
    #[arg(long)]
    level: Option<f64>,
    /// Fixed critical value for |statistic| instead of calibration
    #[arg(long)]
    threshold: Option<f64>,
    /// Null replications for Monte Carlo calibration
    #[arg(long)]
    cal_reps: Option<usize>,
    /// Variance table CSV (columns n,var_alpha) for asymptotic calibration
    #[arg(long)]
    var_table: Option<PathBuf>,
    /// Variance of the Upsilon pool behind --var-table
    #[arg(long)]
    upsilon_var: Option<f64>,
}

#[derive(Args)]
struct HabitatSimulateArgs {
    /// Diffusivity above zero
    #[arg(long)]
    a_plus: Option<f64>,
    /// Diffusivity below zero
    #[arg(long)]
    a_minus: Option<f64>,
    /// Generator form: L (divergence) or A (non-divergence)
    #[arg(long)]
    generator: Option<String>,
    /// Starting point (either sign)
    #[arg(long)]
    x0: Option<f64>,
    /// Time horizon
    #[arg(long)]
    t: Option<f64>,
    /// Number of grid steps
    #[arg(long)]
    n: Option<usize>,
}

/// Manifest counterpart of the flags. Unknown keys are rejected so a typo
/// cannot silently fall back to a default.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    output_dir: Option<PathBuf>,
    out: Option<PathBuf>,
    theta: Option<f64>,
    x0: Option<f64>,
    t: Option<f64>,
    n: Option<usize>,
    n_list: Option<Vec<usize>>,
    reps: Option<usize>,
    pool: Option<usize>,
    bins: Option<usize>,
    count: Option<usize>,
    k_max: Option<usize>,
    level: Option<f64>,
    threshold: Option<f64>,
    cal_reps: Option<usize>,
    upsilon_var: Option<f64>,
    a_plus: Option<f64>,
    a_minus: Option<f64>,
    generator: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file_cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file_cfg.seed).unwrap_or(0);
    let threads = match cli.threads.or(file_cfg.threads) {
        Some(0) => return Err(Error::Domain("--threads must be at least 1".into())),
        Some(k) => k,
        None => 0, // rayon reads 0 as "all cores"
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let output_dir = cli
        .output_dir
        .or_else(|| file_cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let out = cli.out.or_else(|| file_cfg.out.clone());

    let ctx = Ctx { seed, output_dir, out, file: file_cfg };
    match cli.command {
        Command::Simulate(a) => simulate_cmd(a, &ctx),
        Command::Estimate(a) => estimate_cmd(a, &ctx),
        Command::MuTable(a) => mu_table_cmd(a, &ctx),
        Command::LimitSample(a) => limit_sample_cmd(a, &ctx),
        Command::Study { study } => match study {
            StudyCommand::Table1(a) => table1_cmd(a, &ctx),
            StudyCommand::Table2(a) => table2_cmd(a, &ctx),
            StudyCommand::Rate(a) => rate_cmd(a, &ctx),
            StudyCommand::VarScaling(a) => var_scaling_cmd(a, &ctx),
            StudyCommand::Power(a) => power_cmd(a, &ctx),
        },
        Command::Test(a) => test_cmd(a, &ctx),
        Command::HabitatSimulate(a) => habitat_simulate_cmd(a, &ctx),
        Command::HabitatDecide(a) => habitat_decide_cmd(a, &ctx),
    }
}

// The worker count is deliberately absent from Ctx and from the emitted
// config headers: outputs must be byte-identical for any --threads value.
struct Ctx {
    seed: u64,
    output_dir: PathBuf,
    out: Option<PathBuf>,
    file: FileConfig,
}

impl Ctx {
    /// Final output path: `--out` (or manifest `out`) if given, else the
    /// command default, resolved against the output directory.
    fn out_path(&self, default_name: &str) -> PathBuf {
        let out = self
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(default_name));
        if out.is_absolute() {
            out
        } else {
            self.output_dir.join(out)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn read_path_file(path: &Path) -> Result<GridPath> {
    let file = File::open(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    io::read_path_csv(BufReader::new(file))
}

fn config_json<C: Serialize>(config: &C) -> Result<String> {
    serde_json::to_string(config).map_err(|e| Error::Domain(format!("config serialization: {e}")))
}

fn write_json_report<C: Serialize, R: Serialize>(
    path: &Path,
    config: &C,
    report: &R,
) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(io::json_document(config, report)?.as_bytes())?;
    w.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_study_outputs(
    result: &studies::ExperimentResult,
    comment: &str,
    table_path: &Path,
    records: Option<&PathBuf>,
    output_dir: &Path,
) -> Result<()> {
    let mut w = create(table_path)?;
    io::write_table_csv(&mut w, comment, &result.table_columns, &result.table)?;
    w.flush()?;
    println!("wrote {}", table_path.display());
    if let Some(rec) = records {
        let rec_path = if rec.is_absolute() { rec.clone() } else { output_dir.join(rec) };
        let mut w = create(&rec_path)?;
        io::write_table_csv(&mut w, comment, &result.record_columns, &result.records)?;
        w.flush()?;
        println!("wrote {}", rec_path.display());
    }
    for (key, value) in &result.summary {
        println!("{key} = {}", io::format_cell(*value));
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateConfig {
    command: &'static str,
    seed: u64,
    theta: f64,
    x0: f64,
    t: f64,
    n: usize,
}

fn simulate_cmd(a: SimulateArgs, ctx: &Ctx) -> Result<()> {
    let cfg = SimulateConfig {
        command: "simulate",
        seed: ctx.seed,
        theta: a.theta.or(ctx.file.theta).unwrap_or(0.0),
        x0: a.x0.or(ctx.file.x0).unwrap_or(0.0),
        t: a.t.or(ctx.file.t).unwrap_or(1.0),
        n: a.n.or(ctx.file.n).unwrap_or(1000),
    };
    let params = SbmParams::new(cfg.theta, cfg.x0, cfg.t, cfg.n)?;
    let mut stream = RngStream::new(cfg.seed, 0);
    let path = simulate_path(&params, &mut stream)?;
    let out = ctx.out_path("path.csv");
    let mut w = create(&out)?;
    io::write_path_csv(&mut w, &config_json(&cfg)?, &path)?;
    w.flush()?;
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct EstimateConfig {
    command: &'static str,
    seed: u64,
    path: String,
}

fn estimate_cmd(a: PathArg, ctx: &Ctx) -> Result<()> {
    let cfg = EstimateConfig {
        command: "estimate",
        seed: ctx.seed,
        path: a.path.display().to_string(),
    };
    let path = read_path_file(&a.path)?;
    let report = mle(&path);
    write_json_report(&ctx.out_path("estimate.json"), &cfg, &report)
}

#[derive(Serialize)]
struct MuTableConfig {
    command: &'static str,
    seed: u64,
    k_max: usize,
}

fn mu_table_cmd(a: MuTableArgs, ctx: &Ctx) -> Result<()> {
    let cfg = MuTableConfig {
        command: "mu-table",
        seed: ctx.seed,
        k_max: a.k_max.or(ctx.file.k_max).unwrap_or(6),
    };
    let table = mu_table(cfg.k_max)?;
    let columns = vec!["k".to_string(), "mu".to_string(), "error_bound".to_string()];
    let rows: Vec<Vec<f64>> = (1..=table.k_max)
        .map(|k| vec![k as f64, table.mu[k - 1], table.err[k - 1]])
        .collect();
    let out = ctx.out_path("mu_table.csv");
    let mut w = create(&out)?;
    io::write_table_csv(&mut w, &config_json(&cfg)?, &columns, &rows)?;
    w.flush()?;
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct LimitSampleConfig {
    command: &'static str,
    seed: u64,
    count: usize,
}

fn limit_sample_cmd(a: LimitSampleArgs, ctx: &Ctx) -> Result<()> {
    let cfg = LimitSampleConfig {
        command: "limit-sample",
        seed: ctx.seed,
        count: a.count.or(ctx.file.count).unwrap_or(1000),
    };
    if cfg.count == 0 {
        return Err(Error::Domain("limit-sample needs count >= 1".into()));
    }
    let mut stream = RngStream::new(cfg.seed, 0);
    let columns = vec!["i".to_string(), "upsilon".to_string(), "h".to_string()];
    let rows: Vec<Vec<f64>> = (0..cfg.count)
        .map(|i| {
            let s = draw_upsilon(&mut stream);
            vec![i as f64, s.value, s.h]
        })
        .collect();
    let out = ctx.out_path("upsilon.csv");
    let mut w = create(&out)?;
    io::write_table_csv(&mut w, &config_json(&cfg)?, &columns, &rows)?;
    w.flush()?;
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct GridStudyConfig {
    command: &'static str,
    seed: u64,
    n_list: Vec<usize>,
    reps: usize,
}

fn grid_config(
    name: &'static str,
    a: &GridStudyArgs,
    ctx: &Ctx,
    default_n: &[usize],
    default_reps: usize,
) -> GridStudyConfig {
    GridStudyConfig {
        command: name,
        seed: ctx.seed,
        n_list: a.n.clone().or_else(|| ctx.file.n_list.clone()).unwrap_or_else(|| default_n.to_vec()),
        reps: a.reps.or(ctx.file.reps).unwrap_or(default_reps),
    }
}

fn table1_cmd(a: GridStudyArgs, ctx: &Ctx) -> Result<()> {
    let cfg = grid_config("study table1", &a, ctx, &[100, 1000, 10_000], 100);
    let result = studies::table1_study(&cfg.n_list, cfg.reps, cfg.seed)?;
    write_study_outputs(
        &result,
        &config_json(&cfg)?,
        &ctx.out_path("table1.csv"),
        a.records.as_ref(),
        &ctx.output_dir,
    )
}

#[derive(Serialize)]
struct Table2Config {
    command: &'static str,
    seed: u64,
    n_list: Vec<usize>,
    reps: usize,
    pool: usize,
}

fn table2_cmd(a: Table2Args, ctx: &Ctx) -> Result<()> {
    let grid = grid_config("study table2", &a.grid, ctx, &[1000], 10_000);
    let cfg = Table2Config {
        command: grid.command,
        seed: grid.seed,
        n_list: grid.n_list,
        reps: grid.reps,
        pool: a.pool.or(ctx.file.pool).unwrap_or(10_000),
    };
    let result = studies::table2_study(&cfg.n_list, cfg.reps, cfg.pool, cfg.seed)?;
    write_study_outputs(
        &result,
        &config_json(&cfg)?,
        &ctx.out_path("table2.csv"),
        a.grid.records.as_ref(),
        &ctx.output_dir,
    )
}

fn rate_cmd(a: GridStudyArgs, ctx: &Ctx) -> Result<()> {
    let cfg = grid_config(
        "study rate",
        &a,
        ctx,
        &[100, 316, 1000, 3162, 10_000, 31_623, 100_000],
        500,
    );
    let (fit, result) = studies::rate_regression(&cfg.n_list, cfg.reps, cfg.seed)?;
    write_study_outputs(
        &result,
        &config_json(&cfg)?,
        &ctx.out_path("rate.csv"),
        a.records.as_ref(),
        &ctx.output_dir,
    )?;
    println!("fit: slope = {}, intercept = {}, r2 = {}", fit.slope, fit.intercept, fit.r2);
    Ok(())
}

fn var_scaling_cmd(a: GridStudyArgs, ctx: &Ctx) -> Result<()> {
    let cfg = grid_config(
        "study var-scaling",
        &a,
        ctx,
        &[50, 250, 1250, 6250, 31_250, 100_000],
        10_000,
    );
    let (fit, result) = studies::variance_scaling(&cfg.n_list, cfg.reps, cfg.seed)?;
    write_study_outputs(
        &result,
        &config_json(&cfg)?,
        &ctx.out_path("var_scaling.csv"),
        a.records.as_ref(),
        &ctx.output_dir,
    )?;
    println!("fit: slope = {}, intercept = {}, r2 = {}", fit.slope, fit.intercept, fit.r2);
    Ok(())
}

#[derive(Serialize)]
struct PowerConfig {
    command: &'static str,
    seed: u64,
    theta: f64,
    n: usize,
    reps: usize,
    bins: usize,
}

fn power_cmd(a: PowerArgs, ctx: &Ctx) -> Result<()> {
    let cfg = PowerConfig {
        command: "study power",
        seed: ctx.seed,
        theta: a.theta.or(ctx.file.theta).unwrap_or(0.5),
        n: a.n.or(ctx.file.n).unwrap_or(1000),
        reps: a.reps.or(ctx.file.reps).unwrap_or(2000),
        bins: a.bins.or(ctx.file.bins).unwrap_or(31),
    };
    let result = studies::power_histogram(cfg.theta, cfg.n, cfg.reps, cfg.bins, cfg.seed)?;
    write_study_outputs(
        &result,
        &config_json(&cfg)?,
        &ctx.out_path("power.csv"),
        None,
        &ctx.output_dir,
    )
}

#[derive(Serialize)]
struct TestConfig {
    command: &'static str,
    seed: u64,
    path: String,
    level: f64,
    calibration: String,
}

fn read_variance_table(path: &Path, upsilon_var: f64) -> Result<VarianceTable> {
    let text = fs::read_to_string(path)?;
    let mut header: Option<Vec<String>> = None;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match &header {
            None => header = Some(fields.iter().map(|s| s.to_string()).collect()),
            Some(cols) => {
                let pos = |name: &str| {
                    cols.iter().position(|c| c == name).ok_or_else(|| {
                        Error::Parse(format!("{}: no column `{name}`", path.display()))
                    })
                };
                let n_col = pos("n")?;
                let var_col = pos("var_alpha")?;
                let parse = |col: usize| -> Result<f64> {
                    fields
                        .get(col)
                        .and_then(|s| s.trim().parse::<f64>().ok())
                        .ok_or_else(|| {
                            Error::Parse(format!("{}: line {}: bad field", path.display(), idx + 1))
                        })
                };
                entries.push((parse(n_col)? as usize, parse(var_col)?));
            }
        }
    }
    Ok(VarianceTable { entries, upsilon_variance: upsilon_var })
}

fn test_cmd(a: TestArgs, ctx: &Ctx) -> Result<()> {
    let level = a.level.or(ctx.file.level).unwrap_or(0.05);
    let threshold = a.threshold.or(ctx.file.threshold);
    let var_table = a.var_table.clone();
    let (calibration, label) = if let Some(value) = threshold {
        (Calibration::Threshold { value }, format!("threshold {value}"))
    } else if let Some(table_path) = var_table {
        let upsilon_var = a.upsilon_var.or(ctx.file.upsilon_var).ok_or_else(|| {
            Error::Domain("--var-table needs --upsilon-var (variance of the Upsilon pool)".into())
        })?;
        let table = read_variance_table(&table_path, upsilon_var)?;
        (
            Calibration::Asymptotic { table },
            format!("asymptotic {} upsilon_var {upsilon_var}", table_path.display()),
        )
    } else {
        let reps = a.cal_reps.or(ctx.file.cal_reps).unwrap_or(2000);
        (
            Calibration::MonteCarlo { reps, seed: ctx.seed },
            format!("monte-carlo reps {reps} seed {}", ctx.seed),
        )
    };
    let cfg = TestConfig {
        command: "test",
        seed: ctx.seed,
        path: a.path.display().to_string(),
        level,
        calibration: label,
    };
    let path = read_path_file(&a.path)?;
    let outcome = hypothesis_test(&path, level, &calibration)?;
    println!(
        "reject = {}, statistic = {}, threshold = {}",
        outcome.reject, outcome.statistic, outcome.threshold
    );
    write_json_report(&ctx.out_path("test.json"), &cfg, &outcome)
}

#[derive(Serialize)]
struct HabitatSimulateConfig {
    command: &'static str,
    seed: u64,
    a_plus: f64,
    a_minus: f64,
    generator: String,
    x0: f64,
    t: f64,
    n: usize,
}

fn parse_generator(s: &str) -> Result<habitat::Generator> {
    match s {
        "L" | "l" => Ok(habitat::Generator::L),
        "A" | "a" => Ok(habitat::Generator::A),
        other => Err(Error::Domain(format!("generator must be L or A, got `{other}`"))),
    }
}

fn habitat_simulate_cmd(a: HabitatSimulateArgs, ctx: &Ctx) -> Result<()> {
    let generator_name = a
        .generator
        .or_else(|| ctx.file.generator.clone())
        .unwrap_or_else(|| "L".to_string());
    let generator = parse_generator(&generator_name)?;
    let cfg = HabitatSimulateConfig {
        command: "habitat-simulate",
        seed: ctx.seed,
        a_plus: a.a_plus.or(ctx.file.a_plus).unwrap_or(4.0),
        a_minus: a.a_minus.or(ctx.file.a_minus).unwrap_or(1.0),
        generator: format!("{generator:?}"),
        x0: a.x0.or(ctx.file.x0).unwrap_or(0.0),
        t: a.t.or(ctx.file.t).unwrap_or(1.0),
        n: a.n.or(ctx.file.n).unwrap_or(10_000),
    };
    let model = habitat::HabitatModel::new(cfg.a_plus, cfg.a_minus, generator)?;
    let mut stream = RngStream::new(cfg.seed, 0);
    let path = habitat::simulate_habitat(&model, cfg.x0, cfg.t, cfg.n, &mut stream)?;
    let out = ctx.out_path("habitat_path.csv");
    let mut w = create(&out)?;
    io::write_path_csv(&mut w, &config_json(&cfg)?, &path)?;
    w.flush()?;
    println!("wrote {}", out.display());
    Ok(())
}

fn habitat_decide_cmd(a: PathArg, ctx: &Ctx) -> Result<()> {
    let cfg = EstimateConfig {
        command: "habitat-decide",
        seed: ctx.seed,
        path: a.path.display().to_string(),
    };
    let path = read_path_file(&a.path)?;
    let decision = habitat::decide_generator(&path)?;
    println!(
        "decided = {:?}, theta_hat = {}, indeterminate = {}",
        decision.decided, decision.theta_hat, decision.indeterminate
    );
    write_json_report(&ctx.out_path("decision.json"), &cfg, &decision)
}
