//! Command-line front end for the maximum-entropy density calibrator.
//!
//! Five subcommands cover the full workflow: `synth-bs` writes a synthetic
//! quote file, `calibrate` fits a density to one, `price`/`plot-data` read
//! the saved density back, and `study` builds method-comparison tables.
//!
//! Exit codes: 0 success, 1 bad invocation or unreadable input, 2 data
//! outside its domain (arbitrage violations name the offending strike),
//! 3 solver gave up before tolerance.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxent_core::market::MarketError;
use maxent_core::solver::{solve_constrained, Termination};
use maxent_core::{
    solve_buchen_kelly, CalibrationError, PiecewiseExpDensity, SolverConfig, SolverReport,
};
use serde::Serialize;

pub mod bs;
pub mod density_io;
pub mod quotes;
pub mod study;

use density_io::fmt17;
use quotes::QuoteFile;
use study::{Endpoints, Method};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad invocation, unreadable file, or malformed file syntax (exit 1).
    Usage(String),
    /// Values outside their domain: arbitrage-violating quotes, instrument
    /// arguments off the density's support, impossible ranges (exit 2).
    Domain(String),
    /// The Newton iteration hit its cap before reaching tolerance (exit 3).
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Domain(s) | CliError::Solver(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Parser)]
#[command(
    name = "maxent",
    version,
    about = "Maximum-entropy densities from European option quotes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit a piecewise-exponential density to a quote file
    Calibrate(CalibrateArgs),
    /// Evaluate prices, the CDF, or quantiles of a saved density
    Price(PriceArgs),
    /// Write a quote file priced under flat-volatility Black-Scholes
    SynthBs(SynthBsArgs),
    /// Compare calibration methods across strike subsets (CSV table)
    Study(StudyArgs),
    /// Sample a saved density on a grid for plotting (CSV)
    PlotData(PlotDataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Solve for the unique continuous density (digital prices are free
    /// variables, fixed by entropy maximization)
    BuchenKelly,
    /// Keep the digital column of the quote file as hard constraints
    WithDigitals,
}

#[derive(Args)]
pub struct CalibrateArgs {
    /// Quote file: `# key=value` header lines, then strike,call[,digital] rows
    pub quotes: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::BuchenKelly)]
    pub mode: Mode,
    /// Stop once the entropy-gradient norm falls below this
    #[arg(long, default_value_t = 1e-9)]
    pub grad_tol: f64,
    /// Cap on accepted Newton steps
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Write the density JSON here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the calibration report JSON here instead of stderr
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Instrument {
    /// Undiscounted call price; value = strike
    Call,
    /// Undiscounted digital price; value = strike
    Digital,
    /// P(S ≤ x); value = x
    Cdf,
    /// Inverse CDF; value = level in (0,1)
    Quantile,
}

#[derive(Args)]
pub struct PriceArgs {
    /// Density JSON written by `calibrate`
    pub density: PathBuf,
    #[arg(value_enum)]
    pub instrument: Instrument,
    /// Strike, point, or quantile level, depending on the instrument
    #[arg(allow_negative_numbers = true)]
    pub value: f64,
}

#[derive(Args)]
pub struct SynthBsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub forward: f64,
    /// Continuously compounded rate, sets the discount factor exp(-rate·maturity)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rate: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Year fraction
    #[arg(long, allow_negative_numbers = true)]
    pub maturity: f64,
    /// Comma-separated strikes, strictly increasing
    #[arg(long, value_delimiter = ',', required = true)]
    pub strikes: Vec<f64>,
    /// Write the quote file here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct StudyArgs {
    /// Quote file with the full strike grid
    pub quotes: PathBuf,
    /// Semicolon-separated index lists, e.g. "0,8,16;0,4,8,12,16"
    /// (default: one subset containing every strike)
    #[arg(long)]
    pub subsets: Option<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Method::Bk, Method::Ccs])]
    pub methods: Vec<Method>,
    /// Flat volatility for the bs method
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Endpoint digitals for the ccs method
    #[arg(long, value_enum, default_value_t = Endpoints::Bk)]
    pub endpoints: Endpoints,
    #[arg(long, default_value_t = 1e-9)]
    pub grad_tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotDataArgs {
    /// Density JSON written by `calibrate`
    pub density: PathBuf,
    /// Left edge of the sampling grid
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub min: f64,
    /// Right edge of the sampling grid (default: the 99.9% quantile)
    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,
    /// Number of grid points, at least 2
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Price(a) => cmd_price(a),
        Command::SynthBs(a) => cmd_synth_bs(a),
        Command::Study(a) => cmd_study(a),
        Command::PlotData(a) => cmd_plot_data(a),
    }
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<(), CliError> {
    let file = QuoteFile::parse(&read_file(&args.quotes)?).map_err(CliError::Usage)?;
    let (slice, digitals) = file.to_market();
    let result = match args.mode {
        Mode::BuchenKelly => {
            let cfg = SolverConfig {
                grad_tol: args.grad_tol,
                max_iter: args.max_iter,
                ..SolverConfig::default()
            };
            solve_buchen_kelly(&slice, &cfg)
        }
        Mode::WithDigitals => {
            let d = digitals.ok_or_else(|| {
                CliError::Domain(
                    "--mode with-digitals needs a digital column in the quote file".to_string(),
                )
            })?;
            solve_constrained(&slice, &d)
        }
    };
    let (density, report) = result.map_err(|e| calibration_error(&e, &slice.strikes))?;

    let density_json = density_io::to_json(&density);
    let report_json = render_report(&density, &report);
    match &args.output {
        Some(p) => write_file(p, &density_json)?,
        None => print!("{density_json}"),
    }
    match &args.report {
        Some(p) => write_file(p, &report_json)?,
        None => eprint!("{report_json}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportJson<'a> {
    entropy: f64,
    gradient_norm: f64,
    iterations: usize,
    termination: &'static str,
    strong_concavity: f64,
    entropy_gap_bound: f64,
    digital_distance_bound: f64,
    l1_distance_bound: f64,
    digitals: &'a [f64],
    gradient_norm_history: &'a [f64],
    step_sizes: &'a [f64],
}

fn render_report(density: &PiecewiseExpDensity, report: &SolverReport) -> String {
    let r = ReportJson {
        entropy: density.entropy(),
        gradient_norm: report.bounds.grad_norm,
        iterations: report.iterations,
        termination: match report.termination {
            Termination::Converged => "converged",
            Termination::MaxIter => "max-iter",
            Termination::Direct => "direct",
        },
        strong_concavity: report.bounds.m,
        entropy_gap_bound: report.bounds.entropy_gap_bound,
        digital_distance_bound: report.bounds.digital_dist_bound,
        l1_distance_bound: report.bounds.l1_bound,
        digitals: &report.solution.values,
        gradient_norm_history: &report.grad_norm_history,
        step_sizes: &report.step_sizes,
    };
    let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_price(args: &PriceArgs) -> Result<(), CliError> {
    let density = density_io::from_json(&read_file(&args.density)?).map_err(CliError::Domain)?;
    let v = args.value;
    let result = match args.instrument {
        Instrument::Call => {
            require(
                v.is_finite() && v >= 0.0,
                "strike must be finite and nonnegative",
            )?;
            density.price_call(v)
        }
        Instrument::Digital => {
            require(
                v.is_finite() && v >= 0.0,
                "strike must be finite and nonnegative",
            )?;
            density.price_digital(v)
        }
        Instrument::Cdf => {
            require(v.is_finite(), "evaluation point must be finite")?;
            density.cdf(v).map_err(|e| calibration_error(&e, &[]))?
        }
        Instrument::Quantile => density
            .quantile(v)
            .map_err(|e| calibration_error(&e, &[]))?,
    };
    println!("{}", fmt17(result));
    Ok(())
}

fn cmd_synth_bs(args: &SynthBsArgs) -> Result<(), CliError> {
    require(
        args.forward.is_finite() && args.forward > 0.0,
        "--forward must be positive and finite",
    )?;
    require(
        args.sigma.is_finite() && args.sigma > 0.0,
        "--sigma must be positive and finite",
    )?;
    require(
        args.maturity.is_finite() && args.maturity > 0.0,
        "--maturity must be positive and finite",
    )?;
    require(args.rate.is_finite(), "--rate must be finite")?;
    let mut prev = 0.0;
    for &k in &args.strikes {
        require(
            k.is_finite() && k > prev,
            "--strikes must be positive and strictly increasing",
        )?;
        prev = k;
    }

    let df = (-args.rate * args.maturity).exp();
    let calls = args
        .strikes
        .iter()
        .map(|&k| df * bs::call(args.forward, k, args.sigma, args.maturity))
        .collect();
    let digitals = args
        .strikes
        .iter()
        .map(|&k| df * bs::digital(args.forward, k, args.sigma, args.maturity))
        .collect();
    let file = QuoteFile {
        forward: args.forward,
        discount_factor: df,
        maturity: Some(format!("{}", args.maturity)),
        strikes: args.strikes.clone(),
        calls,
        digitals: Some(digitals),
    };
    emit(&args.output, &file.render())
}

fn cmd_study(args: &StudyArgs) -> Result<(), CliError> {
    let file = QuoteFile::parse(&read_file(&args.quotes)?).map_err(CliError::Usage)?;
    let n = file.strikes.len();
    require(n >= 1, "quote file has no strikes to study")?;
    let subsets = match &args.subsets {
        Some(s) => study::parse_subsets(s, n).map_err(CliError::Domain)?,
        None => vec![(0..n).collect()],
    };
    let cfg = study::StudyConfig {
        methods: args.methods.clone(),
        endpoints: args.endpoints,
        sigma: args.sigma,
        grad_tol: args.grad_tol,
        max_iter: args.max_iter,
    };
    let csv = study::run(&file, &subsets, &cfg)?;
    emit(&args.output, &csv)
}

fn cmd_plot_data(args: &PlotDataArgs) -> Result<(), CliError> {
    let density = density_io::from_json(&read_file(&args.density)?).map_err(CliError::Domain)?;
    require(args.samples >= 2, "--samples must be at least 2")?;
    let lo = args.min;
    let hi = match args.max {
        Some(h) => h,
        None => density
            .quantile(0.999)
            .map_err(|e| calibration_error(&e, &[]))?,
    };
    require(
        lo.is_finite() && hi.is_finite() && lo < hi,
        "sampling range must satisfy min < max with both finite",
    )?;

    let mut out = String::from("x,density\n");
    let steps = (args.samples - 1) as f64;
    for j in 0..args.samples {
        let x = lo + (hi - lo) * j as f64 / steps;
        out.push_str(&format!("{},{}\n", x, density.value(x)));
    }
    // One-sided limits at each interior breakpoint: equal exactly when the
    // density is the continuous entropy maximizer.
    out.push_str("strike,density_left,density_right\n");
    let (bp, la, be) = (density.breakpoints(), density.log_alpha(), density.beta());
    for i in 1..density.segments() {
        let k = bp[i];
        let left = (la[i - 1] + be[i - 1] * k).exp();
        let right = (la[i] + be[i] * k).exp();
        out.push_str(&format!("{k},{left},{right}\n"));
    }
    emit(&args.output, &out)
}

/// Point calibration failures at the quote that caused them. Market errors
/// carry a 1-based index where 0 means the forward.
pub(crate) fn calibration_error(e: &CalibrationError, strikes: &[f64]) -> CliError {
    let at = |index: usize| -> String {
        if index == 0 {
            "the forward quote".to_string()
        } else {
            match strikes.get(index - 1) {
                Some(k) => format!("strike {k}"),
                None => "the tail".to_string(),
            }
        }
    };
    match e {
        CalibrationError::Market(m) => CliError::Domain(match m {
            MarketError::BadStrikes { index } => format!(
                "strikes must be positive and strictly increasing; violation at {}",
                at(*index)
            ),
            MarketError::NonMonotoneCalls { index } => format!(
                "call quotes must fall strictly as strike rises; violation at {}",
                at(*index)
            ),
            MarketError::NonConvexCalls { index } => format!(
                "call quotes are not strictly convex at {}; no digital price is consistent with them",
                at(*index)
            ),
            MarketError::BelowIntrinsic => format!(
                "call quote at {} is at or below its intrinsic value",
                at(1)
            ),
            MarketError::OutOfRectangle { index } => format!(
                "digital quote at {} lies outside its call-spread bounds",
                at(*index)
            ),
            MarketError::WrongDigitalCount { expected, got } => {
                format!("expected {expected} digital quotes, got {got}")
            }
        }),
        CalibrationError::MaxIterExceeded(_) | CalibrationError::SingularPivot => {
            CliError::Solver(e.to_string())
        }
        _ => CliError::Domain(e.to_string()),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(target: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match target {
        Some(p) => write_file(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Domain(msg.to_string()))
    }
}
