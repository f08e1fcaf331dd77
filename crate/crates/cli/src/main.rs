//! `nmgme`: GME detection verdicts, figure data, channel diagnostics and a
//! self-check, all on three-qubit states.
//!
//! Exit codes: `detect` returns 0 for GME-detected and 1 for inconclusive;
//! `verify` returns 0 when every check passes and 1 otherwise. Any input
//! error exits with 2.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nmgme::gmedetect::{
    detect_gme, region_scan, resolve_noisy_ghz_form, trajectory, witness_operator, AlphaRule, EvolveMode, GmeMap,
    Verdict, DETECTION_TOL,
};
use nmgme::io::{read_state, region_csv, state_to_json, trajectory_csv};
use nmgme::lindblad::{
    check_divisibility, is_completely_positive, is_eternal_nm, CpReport, EternalNmReport, MapParams, RateSchedule,
    SingleQubitMap,
};
use nmgme::states::{ghz, ghz_tilde, noisy_ghz, random_biseparable, w_state};
use nmgme::verify::{self, linspace, VerifyConfig};
use nmgme::{DensityMatrix, Error, Result};

const DEFAULT_RATES: &str = "const:1,tanh";

#[derive(Parser)]
#[command(name = "nmgme", version, about = "Three-qubit GME detection from an eternally non-Markovian channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a state is certified genuinely multipartite entangled.
    Detect(DetectArgs),
    /// Minimum eigenvalue of the noisy-GHZ detector over a (p, beta) grid.
    Region(RegionArgs),
    /// Minimum eigenvalue along the channel evolution, for GHZ and a
    /// biseparable start.
    Trajectory(TrajectoryArgs),
    /// Complete positivity, eternal non-Markovianity and divisibility of the channel.
    Channel(ChannelArgs),
    /// Run the seeded self-check suite.
    Verify(VerifyArgs),
    /// Write a state file.
    State(StateArgs),
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    state: PathBuf,
    /// Step-map alpha; defaults to beta when only beta is given.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Rate descriptor, e.g. `const:1,tanh` or `tanh`; used with --eps and --time.
    #[arg(long)]
    rates: Option<String>,
    #[arg(long, default_value_t = 1.0 / 50.0)]
    eps: f64,
    /// Time at which the rates are evaluated.
    #[arg(long)]
    time: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, default_value = "0:1:101")]
    p_grid: Grid,
    #[arg(long, default_value = "0:0.25:101")]
    beta_grid: Grid,
    /// Fixed alpha for every grid point.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long, default_value = DEFAULT_RATES)]
    rates: String,
    #[arg(long, default_value_t = 1.0 / 50.0)]
    eps: f64,
    #[arg(long, default_value_t = 150)]
    steps: usize,
    /// Seed for the biseparable starting state.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "all")]
    evolve_mode: Mode,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long, default_value = DEFAULT_RATES)]
    rates: String,
    #[arg(long, default_value_t = 1.0 / 50.0)]
    eps: f64,
    #[arg(long, default_value_t = 3.0)]
    horizon: f64,
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Trace-term constant as a multiple of beta.
    #[arg(long, default_value_t = 2.0)]
    c_scale: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Ghz,
    GhzTilde,
    W,
    Mixed,
    NoisyGhz,
    Biseparable,
}

#[derive(Args)]
struct StateArgs {
    #[arg(value_enum)]
    kind: StateKind,
    /// GHZ weight for `noisy-ghz`.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of mixture terms for `biseparable`.
    #[arg(long, default_value_t = 3)]
    terms: usize,
    #[command(flatten)]
    output: Output,
}

/// `lo:hi:n` with `n >= 2`.
#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got `{s}`"));
        };
        let lo: f64 = lo.parse().map_err(|e| format!("lo: {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("hi: {e}"))?;
        let n: usize = n.parse().map_err(|e| format!("n: {e}"))?;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(format!("need finite lo <= hi, got {lo}:{hi}"));
        }
        if n < 2 {
            return Err(format!("grid needs at least 2 points, got {n}"));
        }
        Ok(Grid(linspace(lo, hi, n)))
    }
}

#[derive(Clone, Copy)]
struct Mode(EvolveMode);

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(Mode)
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn detect(args: &DetectArgs) -> Result<ExitCode> {
    let rho = read_state(&args.state)?;
    let explicit = args.alpha.is_some() || args.beta.is_some();
    let from_rates = args.rates.is_some() || args.time.is_some();
    let params = match (explicit, from_rates) {
        (true, true) => {
            return Err(Error::InvalidArgument(
                "give either --alpha/--beta or --rates/--time, not both".into(),
            ))
        }
        (true, false) => {
            let beta = args.beta.ok_or_else(|| Error::InvalidArgument("--alpha needs --beta".into()))?;
            MapParams::new(args.alpha.unwrap_or(beta), beta)?
        }
        (false, _) => {
            let rates = RateSchedule::parse(args.rates.as_deref().unwrap_or(DEFAULT_RATES))?;
            MapParams::from_rates(&rates, args.time.unwrap_or(1.0), args.eps)?
        }
    };
    let report = detect_gme(&rho, &GmeMap::new(params), DETECTION_TOL)?.with_witness(&witness_operator(params), &rho);
    args.output.emit(&json(&report))?;
    Ok(match report.verdict {
        Verdict::GmeDetected => ExitCode::SUCCESS,
        Verdict::Inconclusive => ExitCode::from(1),
    })
}

fn region(args: &RegionArgs) -> Result<ExitCode> {
    let rule = AlphaRule::Fixed(args.alpha);
    // The contour column comes from whichever closed form the eigensolver
    // confirms; the minimum eigenvalue does not depend on alpha.
    let confirmed =
        resolve_noisy_ghz_form(&linspace(0.0, 1.0, 50), &linspace(0.0, 0.25, 50), AlphaRule::Fixed(0.25), 1e-10)?
            .winner();
    let table = region_scan(&args.p_grid.0, &args.beta_grid.0, rule);
    args.output.emit(&region_csv(&table, confirmed))?;
    Ok(ExitCode::SUCCESS)
}

fn trajectories(args: &TrajectoryArgs) -> Result<ExitCode> {
    let rates = RateSchedule::parse(&args.rates)?;
    let ghz_rows = trajectory(&ghz().projector(), &rates, args.eps, args.steps, args.evolve_mode.0)?;
    let (bisep, _) = random_biseparable(3, args.seed)?;
    let bisep_rows = trajectory(&bisep, &rates, args.eps, args.steps, args.evolve_mode.0)?;
    let text = format!(
        "# ghz\n{}\n# biseparable seed={}\n{}",
        trajectory_csv(&ghz_rows),
        args.seed,
        trajectory_csv(&bisep_rows)
    );
    args.output.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct StepCp {
    t: f64,
    alpha: f64,
    beta: f64,
    #[serde(flatten)]
    report: CpReport,
}

#[derive(Serialize)]
struct ChannelReport {
    rates: String,
    eps: f64,
    horizon: f64,
    eternal_nm: EternalNmReport,
    step_maps: Vec<StepCp>,
    divisibility_residual: f64,
}

fn channel(args: &ChannelArgs) -> Result<ExitCode> {
    let rates = RateSchedule::parse(&args.rates)?;
    let eternal_nm = is_eternal_nm(&rates, args.horizon, args.samples)?;
    let step_maps = eternal_nm
        .samples
        .iter()
        .map(|s| {
            let p = MapParams::from_rates(&rates, s.t, args.eps)?;
            Ok(StepCp {
                t: s.t,
                alpha: p.alpha(),
                beta: p.beta(),
                report: is_completely_positive(&SingleQubitMap::Intermediate(p), nmgme::lindblad::CP_TOL),
            })
        })
        .collect::<Result<_>>()?;
    let report = ChannelReport {
        rates: rates.to_string(),
        eps: args.eps,
        horizon: args.horizon,
        divisibility_residual: check_divisibility(&rates, 0.0, args.horizon, 16)?,
        eternal_nm,
        step_maps,
    };
    args.output.emit(&json(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode> {
    if !(args.c_scale >= 0.0) || !args.c_scale.is_finite() {
        return Err(Error::InvalidTraceConstant(args.c_scale));
    }
    let report = verify::run(&VerifyConfig {
        seed: args.seed,
        c_scale: args.c_scale,
        ..VerifyConfig::default()
    })?;
    args.output.emit(&json(&report))?;
    Ok(if report.all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn state(args: &StateArgs) -> Result<ExitCode> {
    let rho: DensityMatrix = match args.kind {
        StateKind::Ghz => ghz().projector(),
        StateKind::GhzTilde => ghz_tilde().projector(),
        StateKind::W => w_state().projector(),
        StateKind::Mixed => DensityMatrix::maximally_mixed(8),
        StateKind::NoisyGhz => noisy_ghz(args.p)?,
        StateKind::Biseparable => random_biseparable(args.terms, args.seed)?.0,
    };
    args.output.emit(&state_to_json(rho.matrix()))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Detect(a) => detect(a),
        Command::Region(a) => region(a),
        Command::Trajectory(a) => trajectories(a),
        Command::Channel(a) => channel(a),
        Command::Verify(a) => run_verify(a),
        Command::State(a) => state(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
