//! Command-line front end. [`run`] returns the process exit code: 0 on
//! success, 1 when a check fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::codec::{load_instance, save_instance};
use crate::energy::energy_report;
use crate::error::{Error, Result};
use crate::harness::{
    phase_csv, run_concentration_suite, run_phase_grid, run_transposition_experiment, thread_pool,
    write_json_lines, ConcentrationConfig, PhaseConfig,
};
use crate::model::{sample_instance, PlantedMode, SeedSpec};
use crate::perm::Permutation;
use crate::solvers::{
    brute_force_map_with_cap, spectral_align, transposition_descent, DEFAULT_BRUTE_FORCE_CAP,
};
use crate::theory::{analytic_grid_checks, final_function_check, union_bound_diagnostic, ThresholdSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wigner-align", version, about = "Recovery experiments for correlated Gaussian Wigner alignment")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recovery frequencies over a grid of sizes and signal levels (CSV).
    Phase(PhaseArgs),
    /// Improving-transposition counts near the threshold (JSON).
    Transpositions(TranspositionArgs),
    /// Monte Carlo and analytic lemma checks (JSON lines).
    Concentration(ConcentrationArgs),
    /// Grid checks of the analytic functions (JSON lines).
    TheoryCheck(TheoryArgs),
    /// Runs a solver on a saved instance (JSON).
    Solve(SolveArgs),
    /// Samples an instance and saves it.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct PhaseArgs {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    brute_cap: Option<usize>,
    #[arg(long)]
    local_max_n: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    /// Write full per-cell records, including skipped cells, as JSON lines.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(serde::Deserialize, Debug, Default)]
#[serde(default, deny_unknown_fields)]
struct TranspositionFile {
    n: Option<usize>,
    a_n: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct TranspositionArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Offset below the threshold: `ρ² = (4 log n − log log n − a_n)/n`.
    #[arg(long, allow_negative_numbers = true)]
    a_n: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include per-trial counts and statistics.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConcentrationArgs {
    /// JSON suite description; defaults to the built-in suite.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Only the deterministic checks.
    #[arg(long)]
    analytic_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    /// Points in the α grid.
    #[arg(long, default_value_t = 100_000)]
    grid: usize,
    /// Points in the β grid for the minimization check.
    #[arg(long, default_value_t = 1001)]
    beta_grid: usize,
    /// Also print the union-bound table at this size.
    #[arg(long, requires = "union_rho")]
    union_n: Option<usize>,
    #[arg(long)]
    union_rho: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Brute,
    Spectral,
    Descent,
    SpectralDescent,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::SpectralDescent)]
    method: Method,
    /// Overrides the coupling stored in the file.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
    brute_cap: usize,
    #[arg(long, default_value_t = 10_000)]
    sweeps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Planting {
    Uniform,
    Identity,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long, value_enum, default_value_t = Planting::Uniform)]
    planted: Planting,
    /// Do not store `H`.
    #[arg(long)]
    drop_noise: bool,
    #[arg(long)]
    out: PathBuf,
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => Ok(serde_json::from_str(&fs::read_to_string(p)?)?),
        None => Ok(T::default()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json_lines<T: Serialize>(items: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_json_lines(items, &mut buf)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn phase(args: PhaseArgs) -> Result<i32> {
    let mut cfg: PhaseConfig = read_config(args.config.as_deref())?;
    if !args.n.is_empty() {
        cfg.n = args.n;
    }
    if !args.gamma.is_empty() {
        cfg.gamma = args.gamma;
    }
    if !args.rho.is_empty() {
        cfg.rho = args.rho;
    }
    cfg.trials = args.trials.unwrap_or(cfg.trials);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.brute_cap = args.brute_cap.unwrap_or(cfg.brute_cap);
    cfg.local_max_n = args.local_max_n.unwrap_or(cfg.local_max_n);
    cfg.sweeps = args.sweeps.unwrap_or(cfg.sweeps);
    if cfg.n.is_empty() || (cfg.gamma.is_empty() && cfg.rho.is_empty()) {
        return Err(Error::InvalidInput("phase needs --n and at least one of --gamma, --rho".into()));
    }
    let report = run_phase_grid(&cfg)?;
    for s in &report.skipped {
        eprintln!("skipped n = {}: {}", s.n, s.reason);
    }
    let text = if args.json {
        let mut s = json_lines(&report.points)?;
        s.push_str(&json_lines(&report.skipped)?);
        s
    } else {
        phase_csv(&report.points)
    };
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn transpositions(args: TranspositionArgs) -> Result<i32> {
    let file: TranspositionFile = read_config(args.config.as_deref())?;
    let n = args.n.or(file.n).ok_or_else(|| Error::InvalidInput("--n is required".into()))?;
    let a_n = args.a_n.or(file.a_n).ok_or_else(|| Error::InvalidInput("--a-n is required".into()))?;
    let trials = args.trials.or(file.trials).unwrap_or(100);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let spec = ThresholdSpec::new(n, a_n)?;
    let mut e = run_transposition_experiment(&spec, trials, seed)?;
    let pz_ok = e.pz_lower_bound.is_none_or(|pz| e.p_x_ge_half_mean >= pz);
    if !args.full {
        e.x_values.clear();
        e.c_stat.clear();
    }
    emit(args.out.as_deref(), &(serde_json::to_string(&e)? + "\n"))?;
    Ok(if pz_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn checks_exit(checks: &[crate::theory::BoundCheck]) -> i32 {
    if checks.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn concentration(args: ConcentrationArgs) -> Result<i32> {
    let mut cfg = if args.analytic_only {
        ConcentrationConfig::analytic_only()
    } else {
        read_config(args.config.as_deref())?
    };
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    let checks = run_concentration_suite(&cfg)?;
    emit(args.out.as_deref(), &json_lines(&checks)?)?;
    Ok(checks_exit(&checks))
}

fn theory_check(args: TheoryArgs) -> Result<i32> {
    let mut checks = analytic_grid_checks(args.grid, args.beta_grid)?;
    checks.push(final_function_check(args.grid)?);
    let mut text = json_lines(&checks)?;
    if let (Some(n), Some(rho)) = (args.union_n, args.union_rho) {
        text.push_str(&json_lines(&[union_bound_diagnostic(n, rho)?])?);
    }
    emit(args.out.as_deref(), &text)?;
    Ok(checks_exit(&checks))
}

#[derive(Serialize)]
struct SolveOutput {
    method: String,
    rho: f64,
    result: crate::solvers::SolveResult,
    energy: crate::energy::EnergyReport,
    overlap: f64,
    recovered: bool,
}

fn solve(args: SolveArgs) -> Result<i32> {
    let inst = load_instance(&args.input)?;
    let rho = args.rho.unwrap_or(inst.rho);
    let (a, b) = (&inst.a, &inst.b);
    let result = match args.method {
        Method::Brute => brute_force_map_with_cap(a, b, rho, args.brute_cap)?,
        Method::Spectral => spectral_align(a, b)?,
        Method::Descent => transposition_descent(a, b, rho, &Permutation::identity(inst.n()), args.sweeps)?,
        Method::SpectralDescent => {
            let start = spectral_align(a, b)?.pi_hat;
            transposition_descent(a, b, rho, &start, args.sweeps)?
        }
    };
    let out = SolveOutput {
        method: format!("{:?}", args.method).to_lowercase(),
        rho,
        energy: energy_report(&result.pi_hat, &inst.planted, a, b, rho)?,
        overlap: Permutation::overlap(&result.pi_hat, &inst.planted)?,
        recovered: result.pi_hat == inst.planted,
        result,
    };
    emit(args.out.as_deref(), &(serde_json::to_string(&out)? + "\n"))?;
    Ok(EXIT_OK)
}

fn sample(args: SampleArgs) -> Result<i32> {
    let mode = match args.planted {
        Planting::Uniform => PlantedMode::Uniform,
        Planting::Identity => PlantedMode::Identity,
    };
    let mut inst = sample_instance(args.n, args.rho, SeedSpec::new(args.seed, args.trial), mode)?;
    if args.drop_noise {
        inst.noise = None;
    }
    save_instance(&inst, &args.out)?;
    let summary = serde_json::json!({
        "path": args.out,
        "n": inst.n(),
        "rho": inst.rho,
        "seed": args.seed,
        "trial": args.trial,
        "planted": inst.planted.images(),
    });
    println!("{summary}");
    Ok(EXIT_OK)
}

fn dispatch(cmd: Command) -> Result<i32> {
    let pool = thread_pool()?;
    pool.install(|| match cmd {
        Command::Phase(a) => phase(a),
        Command::Transpositions(a) => transpositions(a),
        Command::Concentration(a) => concentration(a),
        Command::TheoryCheck(a) => theory_check(a),
        Command::Solve(a) => solve(a),
        Command::Sample(a) => sample(a),
    })
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
