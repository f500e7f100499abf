//! Command-line front end: joint-distribution dumps, Bell-functional
//! evaluation, resolution and squeezing sweeps, and the classical-bound
//! check. All output is deterministic CSV (17 significant digits,
//! newline-terminated rows), so identical flags produce identical bytes.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use phasebell::{
    bell_ch_factorized, bell_s_factorized, circle_coeffs, enumerate_lhv_bounds, equal_coeffs,
    joint_distribution, optimize_psi, parse_coeff_lines, tms_coeffs, BellEvaluation, BinnedSystem,
    CoefficientVector, Functional, NormalizationMode, PhaseGrid, SchemeSpec, PSI0_MAX,
};

#[derive(Parser)]
#[command(
    name = "phasebell",
    version,
    about = "Bell-inequality predictions for discrete phase measurements on correlated photon pairs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dump the joint phase-outcome distribution as CSV (mu1,mu2,p).
    Dist(DistArgs),
    /// Evaluate B_CH and B_S at one angle, or at the optimized angle.
    Bell(BellArgs),
    /// Optimized B_CH per resolution s (CSV: s,psi0_opt,b_ch_max).
    SweepS(SweepSArgs),
    /// B_CH over a (lambda, psi0) grid for the squeezed family
    /// (CSV: s,lambda,psi0,b_ch).
    SweepLambda(SweepLambdaArgs),
    /// Check the classical bounds by enumerating all 16 deterministic
    /// hidden-variable strategies.
    LhvCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StateFamily {
    Equal,
    Tms,
    Circle,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Raw,
    Renorm,
}

impl From<ModeArg> for NormalizationMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Raw => NormalizationMode::ProjectedRaw,
            ModeArg::Renorm => NormalizationMode::Renormalized,
        }
    }
}

#[derive(Args)]
struct StateArgs {
    /// State family.
    #[arg(long, value_enum, default_value_t = StateFamily::Equal)]
    state: StateFamily,
    /// Squeezing parameter for --state tms (0 <= lambda < 1).
    #[arg(long)]
    lambda: Option<f64>,
    /// Circle-state radius for --state circle.
    #[arg(long)]
    r: Option<f64>,
    /// Coefficient file for --state custom: one decimal per line,
    /// line index = photon number, blank lines and '#' comments ignored.
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

impl StateArgs {
    /// Build the state truncated at s+1 coefficients (the measurement
    /// only probes n <= s).
    fn build(&self, s: usize) -> Result<CoefficientVector, CliError> {
        match self.state {
            StateFamily::Equal => Ok(equal_coeffs(s)),
            StateFamily::Tms => {
                let lambda = self.lambda.ok_or_else(|| {
                    CliError::Flag("--lambda is required for --state tms".to_string())
                })?;
                Ok(tms_coeffs(lambda, s + 1)?)
            }
            StateFamily::Circle => {
                let r = self.r.ok_or_else(|| {
                    CliError::Flag("--r is required for --state circle".to_string())
                })?;
                Ok(circle_coeffs(r, s + 1)?)
            }
            StateFamily::Custom => {
                let path = self.coeffs.as_ref().ok_or_else(|| {
                    CliError::Flag("--coeffs PATH is required for --state custom".to_string())
                })?;
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Flag(format!("cannot read {}: {e}", path.display())))?;
                Ok(parse_coeff_lines(&text)?)
            }
        }
    }
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measurement resolution (s+1 outcomes per mode).
    #[arg(long)]
    s: usize,
    /// Sum of the two reference phases, radians.
    #[arg(long, default_value_t = 0.0)]
    psi0: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Raw)]
    mode: ModeArg,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BellArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measurement resolution (s+1 outcomes per mode).
    #[arg(long)]
    s: usize,
    /// Binning scheme: equal, single, or custom:IDX,IDX,...
    #[arg(long, default_value = "equal", value_parser = parse_scheme)]
    scheme: SchemeSpec,
    /// Fixed angle sum psi0, radians.
    #[arg(long)]
    psi0: Option<f64>,
    /// Search psi0 in [0, 2*pi/3] for the maximal B_CH instead of
    /// fixing it.
    #[arg(long)]
    optimize: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Raw)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepSArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Resolutions to sweep: comma list and/or inclusive ranges with an
    /// optional step, e.g. `1,3,9` or `1..201:2`.
    #[arg(long, default_value = "1..201:2")]
    s: String,
    #[arg(long, default_value = "single", value_parser = parse_scheme)]
    scheme: SchemeSpec,
    #[arg(long, value_enum, default_value_t = ModeArg::Raw)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepLambdaArgs {
    /// Resolutions to sweep (same syntax as sweep-s).
    #[arg(long, default_value = "3,7")]
    s: String,
    #[arg(long, default_value = "single", value_parser = parse_scheme)]
    scheme: SchemeSpec,
    /// Number of lambda samples over [0, 1), endpoint excluded.
    #[arg(long, default_value_t = 200)]
    lambda_grid: usize,
    /// Number of psi0 samples over [0, 2*pi/3], endpoints included.
    #[arg(long, default_value_t = 200)]
    psi0_grid: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Raw)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    /// Bad flags or unusable input files: exit status 2.
    Flag(String),
    /// Numeric failures (zero denominators and friends): exit status 1.
    Numeric(String),
}

impl From<phasebell::Error> for CliError {
    fn from(err: phasebell::Error) -> Self {
        use phasebell::Error::*;
        match err {
            EmptyCoefficients
            | NonFiniteCoefficient { .. }
            | InvalidLambda(_)
            | InvalidRadius(_)
            | CoefficientOverflow
            | InvalidScheme(_)
            | CoeffFileParse { .. } => CliError::Flag(err.to_string()),
            OutcomeOutOfRange { .. }
            | ResolutionMismatch { .. }
            | ZeroMass
            | NegativeProbability(_)
            | InvalidWeights(_) => CliError::Numeric(err.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Flag(format!("i/o error: {err}"))
    }
}

fn parse_scheme(text: &str) -> Result<SchemeSpec, String> {
    text.parse::<SchemeSpec>().map_err(|e| e.to_string())
}

/// Parse `1,3,9`, `1..201:2`, or a mix; returns sorted, deduplicated.
fn parse_s_list(text: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (hi, step),
                None => (rest, "1"),
            };
            let lo: usize = lo
                .trim()
                .parse()
                .map_err(|_| CliError::Flag(format!("bad range start in {item:?}")))?;
            let hi: usize = hi
                .trim()
                .parse()
                .map_err(|_| CliError::Flag(format!("bad range end in {item:?}")))?;
            let step: usize = step
                .trim()
                .parse()
                .map_err(|_| CliError::Flag(format!("bad range step in {item:?}")))?;
            if step == 0 {
                return Err(CliError::Flag(format!("zero step in {item:?}")));
            }
            if hi < lo {
                return Err(CliError::Flag(format!("empty range {item:?}")));
            }
            out.extend((lo..=hi).step_by(step));
        } else {
            out.push(
                item.parse()
                    .map_err(|_| CliError::Flag(format!("bad resolution {item:?}")))?,
            );
        }
    }
    if out.is_empty() {
        return Err(CliError::Flag("no resolutions given".to_string()));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            let file = fs::File::create(p)
                .map_err(|e| CliError::Flag(format!("cannot create {}: {e}", p.display())))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// 17 significant digits, the fixed CSV float format.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// RFC-4180 quoting for fields that can contain commas (custom scheme
/// labels like `custom:0,2`).
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_dist(args: &DistArgs) -> Result<(), CliError> {
    let state = args.state.build(args.s)?;
    let grid = PhaseGrid::new(args.s, args.psi0, 0.0);
    let dist = joint_distribution(&state, &grid, args.mode.into())?;
    let mut w = open_out(&args.out)?;
    dist.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_bell(args: &BellArgs) -> Result<(), CliError> {
    let state = args.state.build(args.s)?;
    let scheme = args.scheme.build(args.s)?;
    let mode: NormalizationMode = args.mode.into();
    let eval: BellEvaluation = match (args.psi0, args.optimize) {
        (Some(psi0), false) => {
            let b_ch = bell_ch_factorized(&state, args.s, &scheme, psi0, mode)?;
            let b_s = bell_s_factorized(&state, args.s, &scheme, psi0, mode)?;
            BellEvaluation::new(b_ch, b_s, psi0, None, mode)
        }
        (None, true) => optimize_psi(&state, args.s, &scheme, Functional::Ch, mode)?,
        _ => {
            return Err(CliError::Flag(
                "give exactly one of --psi0 VALUE or --optimize".to_string(),
            ))
        }
    };
    let mut w = open_out(&args.out)?;
    writeln!(w, "s,scheme,psi0,b_ch,b_s,violates_ch,violates_s")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        args.s,
        csv_field(&scheme.label()),
        fmt(eval.psi0),
        fmt(eval.b_ch),
        fmt(eval.b_s),
        eval.violates_ch,
        eval.violates_s
    )?;
    w.flush()?;
    Ok(())
}

fn cmd_sweep_s(args: &SweepSArgs) -> Result<(), CliError> {
    let s_values = parse_s_list(&args.s)?;
    let mode: NormalizationMode = args.mode.into();
    let mut w = open_out(&args.out)?;
    writeln!(w, "s,psi0_opt,b_ch_max")?;
    for &s in &s_values {
        let state = args.state.build(s)?;
        let scheme = args.scheme.build(s)?;
        let eval = optimize_psi(&state, s, &scheme, Functional::Ch, mode)?;
        writeln!(w, "{},{},{}", s, fmt(eval.psi0), fmt(eval.b_ch))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep_lambda(args: &SweepLambdaArgs) -> Result<(), CliError> {
    if args.lambda_grid < 2 || args.psi0_grid < 2 {
        return Err(CliError::Flag(
            "--lambda-grid and --psi0-grid need at least 2 points".to_string(),
        ));
    }
    let s_values = parse_s_list(&args.s)?;
    let mode: NormalizationMode = args.mode.into();
    let mut w = open_out(&args.out)?;
    writeln!(w, "s,lambda,psi0,b_ch")?;
    for &s in &s_values {
        let scheme = args.scheme.build(s)?;
        for j in 0..args.lambda_grid {
            let lambda = j as f64 / args.lambda_grid as f64;
            let state = tms_coeffs(lambda, s + 1)?;
            let sys = BinnedSystem::new(&state, s, &scheme, mode)?;
            for i in 0..args.psi0_grid {
                let psi0 = i as f64 * PSI0_MAX / (args.psi0_grid - 1) as f64;
                let b_ch = sys.b_ch(psi0)?;
                writeln!(w, "{},{},{},{}", s, fmt(lambda), fmt(psi0), fmt(b_ch))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_lhv_check() -> Result<(), CliError> {
    let (max_bs, max_ch) = enumerate_lhv_bounds();
    let pass = max_bs == 2.0 && max_ch == 1.0;
    let mut w = open_out(&None)?;
    writeln!(
        w,
        "max |B_S| over 16 deterministic strategies: {} (bound 2)",
        fmt(max_bs)
    )?;
    writeln!(
        w,
        "max |B_CH| over 16 deterministic strategies: {} (bound 1)",
        fmt(max_ch)
    )?;
    writeln!(w, "{}", if pass { "PASS" } else { "FAIL" })?;
    w.flush()?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "hidden-variable maxima ({max_bs}, {max_ch}) differ from (2, 1)"
        )))
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Dist(args) => cmd_dist(args),
        Cmd::Bell(args) => cmd_bell(args),
        Cmd::SweepS(args) => cmd_sweep_s(args),
        Cmd::SweepLambda(args) => cmd_sweep_lambda(args),
        Cmd::LhvCheck => cmd_lhv_check(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Flag(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
