//! The `qwalk` command line: regime reports, stationary profiles, dynamics
//! runs with agreement diagnostics, limit-law tables, and KS convergence
//! sweeps, exported as locale-free CSV or JSON.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure (the
//! iteration did not converge, or the fixed-point system was singular).

mod export;

pub use export::{
    import_profile_json, sweep_csv, sweep_json, ContinuousLawDoc, DiscreteLawDoc, ProfileDoc,
    ProfileMetadata, SweepRowDoc,
};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use qwalk_core::{
    eigen_residual, empirical_distribution, limit_cdf, limit_density, run_until_stationary,
    select_limit_law, stationary_distribution, sweep_row, xi_from_theta, Branch, Coin, Complex64,
    Error as CoreError, LimitLaw, RegimeParams, Scaling, SweepRow, WalkConfig, DEFAULT_REGIME_EPS,
};

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Source/sink quantum walk on a finite path: stationary profiles and their limit laws",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a driving frequency against the coin's band structure
    Regime(RegimeArgs),
    /// Closed-form stationary profile over the path
    Stationary(StationaryArgs),
    /// Iterate the walk to its fixed point and compare with the closed form
    Simulate(SimulateArgs),
    /// Tabulate the limit law selected by the frequency scaling
    Limit(LimitArgs),
    /// KS distance to the limit law across a list of path lengths
    Sweep(SweepArgs),
}

/// Coin matrix: `hadamard`, `rot:<angle>` (radians), or eight floats
/// `re,im,re,im,re,im,re,im` for a, b, c, d.
#[derive(Args)]
struct CoinArg {
    #[arg(long, value_name = "SPEC")]
    coin: String,
}

#[derive(Args)]
#[command(group(ArgGroup::new("freq").required(true).multiple(false)))]
struct RegimeArgs {
    #[command(flatten)]
    coin: CoinArg,
    /// Driving frequency in radians
    #[arg(long, group = "freq", allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Target M*theta; xi is derived at theta = theta*/M (needs --M)
    #[arg(long = "theta-star", group = "freq", requires = "m", allow_negative_numbers = true)]
    theta_star: Option<f64>,
    /// Number of path sites
    #[arg(long = "M", value_parser = clap::value_parser!(u64).range(1..))]
    m: Option<u64>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("freq").required(true).multiple(false)))]
struct StationaryArgs {
    #[command(flatten)]
    coin: CoinArg,
    /// Driving frequency in radians
    #[arg(long, group = "freq", allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Target M*theta; xi is derived at theta = theta*/M
    #[arg(long = "theta-star", group = "freq", allow_negative_numbers = true)]
    theta_star: Option<f64>,
    /// Number of path sites
    #[arg(long = "M", value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    /// Add F_limit/abs_diff columns for the law the regime converges to
    #[arg(long = "with-law")]
    with_law: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(group(ArgGroup::new("freq").required(true).multiple(false)))]
struct SimulateArgs {
    #[command(flatten)]
    coin: CoinArg,
    /// Driving frequency in radians
    #[arg(long, group = "freq", allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Target M*theta; xi is derived at theta = theta*/M
    #[arg(long = "theta-star", group = "freq", allow_negative_numbers = true)]
    theta_star: Option<f64>,
    /// Number of path sites
    #[arg(long = "M", value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    /// Stop once the sup-norm step change falls below this
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Give up (exit 2) after this many steps
    #[arg(long = "t-max", default_value_t = 100_000)]
    t_max: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(group(ArgGroup::new("freq").required(true).multiple(false)))]
struct LimitArgs {
    #[command(flatten)]
    coin: CoinArg,
    /// Driving frequency in radians; the law follows from its regime
    #[arg(long, group = "freq", allow_negative_numbers = true)]
    xi: Option<f64>,
    /// M*theta target; selects the law directly (0 = cubic, inf = uniform)
    #[arg(long = "theta-star", group = "freq", allow_negative_numbers = true)]
    theta_star: Option<f64>,
    /// Rows to tabulate: grid points on [0,1], or sites for the geometric law
    #[arg(long, default_value_t = 1001, value_parser = clap::value_parser!(u64).range(2..))]
    points: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[command(group(ArgGroup::new("freq").required(true).multiple(false)))]
struct SweepArgs {
    #[command(flatten)]
    coin: CoinArg,
    /// Driving frequency in radians, held fixed across M
    #[arg(long, group = "freq", allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Target M*theta held fixed across M (xi re-derived per row)
    #[arg(long = "theta-star", group = "freq", allow_negative_numbers = true)]
    theta_star: Option<f64>,
    /// Comma-separated path lengths; empty emits a header-only file
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
    ms: Vec<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Numerical(msg) => f.write_str(msg),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NoConvergence { .. } | CoreError::SingularSystem { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses and dispatches; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Regime(args) => regime(args),
        Command::Stationary(args) => stationary(args),
        Command::Simulate(args) => simulate(args),
        Command::Limit(args) => limit(args),
        Command::Sweep(args) => sweep(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn parse_coin(spec: &str) -> Result<Coin, CliError> {
    let usage = |msg: String| CliError::Usage(msg);
    if spec == "hadamard" {
        return Ok(Coin::hadamard());
    }
    if let Some(angle) = spec.strip_prefix("rot:") {
        let angle: f64 = angle
            .parse()
            .map_err(|_| usage(format!("bad rotation angle {angle:?} (radians expected)")))?;
        return Coin::rotation(angle).map_err(|e| usage(e.to_string()));
    }
    let parts: Result<Vec<f64>, _> = spec.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let parts = parts.map_err(|_| {
        usage(format!(
            "bad coin {spec:?}: expected `hadamard`, `rot:<angle>`, or eight floats re,im,... for a,b,c,d"
        ))
    })?;
    if parts.len() != 8 {
        return Err(usage(format!("coin needs exactly 8 floats, got {}", parts.len())));
    }
    Coin::new(
        Complex64::new(parts[0], parts[1]),
        Complex64::new(parts[2], parts[3]),
        Complex64::new(parts[4], parts[5]),
        Complex64::new(parts[6], parts[7]),
    )
    .map_err(|e| usage(e.to_string()))
}

/// Resolves the frequency flags to a concrete xi plus the scaling they imply.
fn resolve_frequency(
    coin: &Coin,
    xi: Option<f64>,
    theta_star: Option<f64>,
    m: Option<u64>,
) -> Result<(f64, Scaling), CliError> {
    match (xi, theta_star) {
        (Some(xi), None) => Ok((xi, Scaling::FixedXi(xi))),
        (None, Some(theta_star)) => {
            if !(theta_star >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--theta-star must be nonnegative, got {theta_star}"
                )));
            }
            let m = m.expect("clap enforces --M with --theta-star");
            let xi = if theta_star == 0.0 {
                // theta -> 0 limit of the Plus branch: the band boundary
                coin.abs_a().acos() - coin.det_phase() / 2.0
            } else {
                xi_from_theta(coin, theta_star / m as f64, Branch::Plus)?
            };
            Ok((xi, Scaling::ThetaStarOverM(theta_star)))
        }
        _ => unreachable!("clap enforces exactly one of --xi / --theta-star"),
    }
}

fn regime_params(coin: &Coin, xi: f64, scaling: Scaling) -> RegimeParams {
    let params = RegimeParams::from_xi(coin, xi, DEFAULT_REGIME_EPS);
    match scaling {
        Scaling::ThetaStarOverM(t) => params.with_theta_star(t),
        Scaling::FixedXi(_) => params,
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn regime(args: RegimeArgs) -> Result<(), CliError> {
    let coin = parse_coin(&args.coin.coin)?;
    let (xi, scaling) = resolve_frequency(&coin, args.xi, args.theta_star, args.m)?;
    let params = regime_params(&coin, xi, scaling);
    let mut out = String::new();
    let _ = writeln!(out, "xi={}", params.xi());
    let _ = writeln!(out, "omega={}", params.omega());
    let _ = writeln!(out, "region={}", params.region());
    if let Some(theta) = params.theta() {
        let _ = writeln!(out, "theta={theta}");
    }
    if let Some((plus, minus)) = params.lambdas() {
        let _ = writeln!(out, "lambda_plus={plus}");
        let _ = writeln!(out, "lambda_minus={minus}");
    }
    if let Some(theta_star) = params.theta_star() {
        let _ = writeln!(out, "theta_star={theta_star}");
    }
    print!("{out}");
    Ok(())
}

fn stationary(args: StationaryArgs) -> Result<(), CliError> {
    let coin = parse_coin(&args.coin.coin)?;
    let m = args.m as usize;
    let (xi, scaling) = resolve_frequency(&coin, args.xi, args.theta_star, Some(args.m))?;
    let params = regime_params(&coin, xi, scaling);
    let law = if args.with_law {
        Some(select_limit_law(&params, scaling)?)
    } else {
        None
    };
    let profile = stationary_distribution(m, &coin, params.omega())?;
    let doc = ProfileDoc::build(&profile, law.as_ref(), &coin, &params);
    let content = match args.output.format {
        Format::Csv => doc.to_csv(),
        Format::Json => doc.to_json(),
    };
    write_output(args.output.out.as_deref(), &content)
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let coin = parse_coin(&args.coin.coin)?;
    let m = args.m as usize;
    let (xi, scaling) = resolve_frequency(&coin, args.xi, args.theta_star, Some(args.m))?;
    let params = regime_params(&coin, xi, scaling);
    let config = WalkConfig::new(m, coin, xi)?;
    let run = run_until_stationary(&config, args.tol, args.t_max as usize)?;
    let phi_star = run.phi_star();
    let simulated = empirical_distribution(phi_star)?;
    let closed = stationary_distribution(m, &coin, params.omega())?;

    let mut max_rel = 0.0_f64;
    for (got, want) in simulated.site_norm_sq().iter().zip(closed.site_norm_sq()) {
        max_rel = max_rel.max((got - want).abs() / want);
    }
    let energy_diff = (simulated.comfortability() - closed.comfortability()).abs();

    let mut report = String::new();
    let _ = writeln!(report, "t={}", run.t);
    let _ = writeln!(report, "residual={}", run.residual);
    let _ = writeln!(report, "eigen_residual={}", eigen_residual(phi_star, &config));
    let _ = writeln!(report, "max_site_rel_diff={max_rel}");
    let _ = writeln!(report, "comfortability={}", simulated.comfortability());
    let _ = writeln!(report, "comfortability_closed={}", closed.comfortability());
    let _ = writeln!(report, "comfortability_abs_diff={energy_diff}");
    print!("{report}");

    if args.output.out.is_some() {
        let doc = ProfileDoc::build(&simulated, None, &coin, &params);
        let content = match args.output.format {
            Format::Csv => doc.to_csv(),
            Format::Json => doc.to_json(),
        };
        write_output(args.output.out.as_deref(), &content)?;
    }
    Ok(())
}

fn limit(args: LimitArgs) -> Result<(), CliError> {
    let coin = parse_coin(&args.coin.coin)?;
    let law = match (args.xi, args.theta_star) {
        (Some(xi), None) => {
            let params = RegimeParams::from_xi(&coin, xi, DEFAULT_REGIME_EPS);
            select_limit_law(&params, Scaling::FixedXi(xi))?
        }
        (None, Some(t)) => {
            if !(t >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--theta-star must be nonnegative, got {t}"
                )));
            }
            if t == 0.0 {
                LimitLaw::Cubic
            } else if t.is_infinite() {
                LimitLaw::Uniform
            } else {
                LimitLaw::sine_squared(t)
            }
        }
        _ => unreachable!("clap enforces exactly one of --xi / --theta-star"),
    };
    let points = args.points as usize;
    let content = match law {
        LimitLaw::Geometric { lambda_plus } => {
            let ratio = 1.0 / (lambda_plus * lambda_plus);
            let j: Vec<usize> = (0..points).collect();
            let pmf: Vec<f64> = j.iter().map(|&k| (1.0 - ratio) * ratio.powi(k as i32)).collect();
            let f_limit: Vec<f64> = j.iter().map(|&k| limit_cdf(&law, k as f64)).collect();
            let doc = DiscreteLawDoc { law: law.to_string(), j, pmf, f_limit };
            match args.output.format {
                Format::Csv => doc.to_csv(),
                Format::Json => doc.to_json(),
            }
        }
        _ => {
            let x: Vec<f64> =
                (0..points).map(|k| k as f64 / (points as f64 - 1.0)).collect();
            let density: Vec<f64> =
                x.iter().map(|&x| limit_density(&law, x).expect("law has a density")).collect();
            let f_limit: Vec<f64> = x.iter().map(|&x| limit_cdf(&law, x)).collect();
            let doc = ContinuousLawDoc { law: law.to_string(), x, density, f_limit };
            match args.output.format {
                Format::Csv => doc.to_csv(),
                Format::Json => doc.to_json(),
            }
        }
    };
    write_output(args.output.out.as_deref(), &content)
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let coin = parse_coin(&args.coin.coin)?;
    let scaling = match (args.xi, args.theta_star) {
        (Some(xi), None) => Scaling::FixedXi(xi),
        (None, Some(t)) => Scaling::ThetaStarOverM(t),
        _ => unreachable!("clap enforces exactly one of --xi / --theta-star"),
    };
    let ms: Vec<usize> = args.ms.iter().map(|&m| m as usize).collect();
    let rows = parallel_sweep(&coin, scaling, &ms)?;
    let content = match args.output.format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => sweep_json(&rows),
    };
    write_output(args.output.out.as_deref(), &content)
}

/// Sweep rows are independent; compute them on a small scoped pool, capped by
/// QWALK_THREADS, and hand back results in input order (first error wins).
fn parallel_sweep(coin: &Coin, scaling: Scaling, ms: &[usize]) -> Result<Vec<SweepRow>, CoreError> {
    let threads = std::env::var("QWALK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
        .min(ms.len().max(1));
    if threads <= 1 {
        return ms.iter().map(|&m| sweep_row(coin, scaling, m)).collect();
    }
    let chunk = ms.len().div_ceil(threads);
    let mut results: Vec<Option<Result<SweepRow, CoreError>>> = (0..ms.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (ms_chunk, out_chunk) in ms.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (&m, slot) in ms_chunk.iter().zip(out_chunk.iter_mut()) {
                    *slot = Some(sweep_row(coin, scaling, m));
                }
            });
        }
    });
    results
        .into_iter()
        .map(|slot| slot.expect("every sweep slot is filled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_specs_parse() {
        assert!(parse_coin("hadamard").is_ok());
        assert!(parse_coin("rot:1.0471975511965976").is_ok());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let spec = format!("{s},0,{s},0,{s},0,-{s},0");
        assert!(parse_coin(&spec).is_ok());
        assert!(parse_coin("rot:abc").is_err());
        assert!(parse_coin("1,2,3").is_err());
        assert!(parse_coin("1,0,0,0,0,0,1,0").is_err()); // trivial, b = 0
        assert!(parse_coin("9,0,9,0,9,0,9,0").is_err()); // not unitary
    }

    #[test]
    fn frequency_resolution() {
        let coin = Coin::hadamard();
        let (xi, scaling) = resolve_frequency(&coin, Some(0.3), None, None).unwrap();
        assert_eq!(xi, 0.3);
        assert_eq!(scaling, Scaling::FixedXi(0.3));

        let (xi, scaling) = resolve_frequency(&coin, None, Some(1.0), Some(100)).unwrap();
        assert_eq!(scaling, Scaling::ThetaStarOverM(1.0));
        let expect = xi_from_theta(&coin, 0.01, Branch::Plus).unwrap();
        assert_eq!(xi, expect);

        // theta* = 0 lands exactly on the band boundary
        let (xi, _) = resolve_frequency(&coin, None, Some(0.0), Some(8)).unwrap();
        let params = RegimeParams::from_xi(&coin, xi, DEFAULT_REGIME_EPS);
        assert_eq!(params.region().to_string(), "BoundaryB");

        assert!(resolve_frequency(&coin, None, Some(-1.0), Some(8)).is_err());
    }

    #[test]
    fn sweep_is_order_preserving_under_threads() {
        let coin = Coin::hadamard();
        let ms = [100usize, 7, 400, 3, 200];
        let serial: Vec<SweepRow> = ms
            .iter()
            .map(|&m| sweep_row(&coin, Scaling::FixedXi(-std::f64::consts::FRAC_PI_4), m).unwrap())
            .collect();
        let parallel =
            parallel_sweep(&coin, Scaling::FixedXi(-std::f64::consts::FRAC_PI_4), &ms).unwrap();
        assert_eq!(parallel.len(), serial.len());
        for (a, b) in parallel.iter().zip(&serial) {
            assert_eq!(a.m, b.m);
            assert_eq!(a.ks.to_bits(), b.ks.to_bits());
        }
    }
}
