//! Command-line pipeline: ingest price data, reproduce the realized
//! variance, distribution-fit and moment-relaxation tables, and export
//! simulated SDE paths.

mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{OutputFormat, Table, Value};
use settings::{parse_families, parse_taus, FileConfig};
use svret::dist::{DistError, DistKind};
use svret::inference::{fit_normal, ks_statistic, ll_diff, ll_ratio, mle_fit, FitError};
use svret::models::{
    simulate_log_return_path, simulate_variance_path, Family, ModelError, ModelParams,
};
use svret::moments::{fit_relaxation, linear_fit, moment_ratio_curve, MomentError};
use svret::series::{fit_growth_rate, realized_variance_curve, tau_returns, PriceSeries, SeriesError};

#[derive(Debug)]
pub enum CliError {
    Io(std::io::Error),
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Io(io) => CliError::Io(io),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        match e {
            DistError::Numerical(msg) => CliError::Numerical(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::Dist(DistError::Numerical(msg)) => CliError::Numerical(msg),
            FitError::Numerical(msg) => CliError::Numerical(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::Dist(DistError::Numerical(msg)) => CliError::Numerical(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(
    name = "svret",
    version,
    about = "Mean-reverting stochastic volatility models vs daily return data"
)]
struct Cli {
    /// Flat key-value TOML config; flags take precedence over it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `.`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// RNG seed for anything stochastic
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a `date,close` CSV; report size, range and drift
    Ingest {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Mean realized variance per horizon with its straight-line fit
    Rv {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Horizons: `1:250`, `1,5,10` or `1:5:250`
        #[arg(long)]
        taus: Option<String>,
    },
    /// Per-horizon maximum-likelihood fits, KS and LL comparisons
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        taus: Option<String>,
        /// Subset of ga,ga-jp,iga,iga-jp,normal
        #[arg(long)]
        families: Option<String>,
    },
    /// Moment-ratio curves against theory and relaxation fits
    Moments {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        taus: Option<String>,
        /// Product families to compare: ga and/or iga
        #[arg(long)]
        families: Option<String>,
        /// Moment half-orders n (moments z^{2n}), e.g. `1,2,3`
        #[arg(long)]
        orders: Option<String>,
    },
    /// Export variance and coupled log-return SDE paths
    Simulate {
        /// ga (square-root noise) or iga (multiplicative noise)
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        /// Alternative to kappa: target shape 2*gamma*theta/kappa^2
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Include the -v/2 dt Ito drift in the return path
        #[arg(long)]
        ito_drift: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn invocation() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

struct Ctx {
    config: FileConfig,
    out_dir: PathBuf,
    format: OutputFormat,
    seed: u64,
    invocation: String,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = FileConfig::load(cli.config.as_deref())?;
    let out_dir = cli
        .out
        .or_else(|| config.str("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = match cli.format.or_else(|| config.str("format")) {
        Some(s) => s.parse().map_err(CliError::Validation)?,
        None => OutputFormat::Csv,
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => config.u64("seed")?.unwrap_or(0),
    };
    let ctx = Ctx {
        config,
        out_dir,
        format,
        seed,
        invocation: invocation(),
    };

    match cli.command {
        Command::Ingest { input } => cmd_ingest(&ctx, input),
        Command::Rv { input, taus } => cmd_rv(&ctx, input, taus),
        Command::Fit {
            input,
            taus,
            families,
        } => cmd_fit(&ctx, input, taus, families),
        Command::Moments {
            input,
            taus,
            families,
            orders,
        } => cmd_moments(&ctx, input, taus, families, orders),
        Command::Simulate {
            family,
            gamma,
            theta,
            kappa,
            alpha,
            rho,
            dt,
            steps,
            ito_drift,
        } => cmd_simulate(
            &ctx, family, gamma, theta, kappa, alpha, rho, dt, steps, ito_drift,
        ),
    }
}

fn load_series(ctx: &Ctx, input: Option<PathBuf>) -> Result<(PriceSeries, f64), CliError> {
    let path = input
        .or_else(|| ctx.config.str("input").map(PathBuf::from))
        .ok_or_else(|| CliError::Validation("missing --input".into()))?;
    let file = std::fs::File::open(&path)?;
    let series = PriceSeries::parse_csv(file)?;
    let mu = fit_growth_rate(&series)?;
    Ok((series, mu))
}

fn resolve_taus(ctx: &Ctx, taus: Option<String>) -> Result<Vec<usize>, CliError> {
    let spec = taus
        .or_else(|| ctx.config.str("taus"))
        .ok_or_else(|| CliError::Validation("missing --taus".into()))?;
    parse_taus(&spec)
}

fn cmd_ingest(ctx: &Ctx, input: Option<PathBuf>) -> Result<(), CliError> {
    let (series, mu) = load_series(ctx, input)?;
    let mut table = Table::new(vec!["date", "close"]);
    for (date, price) in series.dates().iter().zip(series.prices()) {
        table.push(vec![Value::Str(date.to_string()), Value::Float(*price)]);
    }
    let path = table.write(&ctx.out_dir, "series", ctx.format, &ctx.invocation)?;
    println!("rows: {}", series.len());
    println!(
        "range: {} .. {}",
        series.dates().first().unwrap(),
        series.dates().last().unwrap()
    );
    println!("mu: {mu:.6e}");
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_rv(ctx: &Ctx, input: Option<PathBuf>, taus: Option<String>) -> Result<(), CliError> {
    let (series, mu) = load_series(ctx, input)?;
    let taus = resolve_taus(ctx, taus)?;
    let curve = realized_variance_curve(&series, mu, &taus)?;
    let pts: Vec<(f64, f64)> = curve.iter().map(|&(t, rv)| (t as f64, rv)).collect();
    let fit = linear_fit(&pts)?;

    let mut table = Table::new(vec!["tau", "mean_rv"]);
    table.notes.push(format!(
        "linear fit: slope={:.16e} intercept={:.16e} r_squared={:.6}",
        fit.slope, fit.intercept, fit.r_squared
    ));
    for (tau, rv) in &curve {
        table.push(vec![Value::Int(*tau as i64), Value::Float(*rv)]);
    }
    let path = table.write(&ctx.out_dir, "rv", ctx.format, &ctx.invocation)?;
    println!("mu: {mu:.6e}");
    println!(
        "rv fit: slope {:.6e}, intercept {:.6e}, r^2 {:.6}",
        fit.slope, fit.intercept, fit.r_squared
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_fit(
    ctx: &Ctx,
    input: Option<PathBuf>,
    taus: Option<String>,
    families: Option<String>,
) -> Result<(), CliError> {
    let (series, mu) = load_series(ctx, input)?;
    let taus = resolve_taus(ctx, taus)?;
    let families = match families.or_else(|| ctx.config.str("families")) {
        Some(s) => parse_families(&s)?,
        None => DistKind::ALL.to_vec(),
    };

    let mut fits_table = Table::new(vec![
        "tau", "family", "alpha", "theta", "loglik", "ks", "converged",
    ]);
    let mut ll_table = Table::new(vec!["tau", "family", "ll_ratio", "ll_diff"]);

    for &tau in &taus {
        let sample = tau_returns(&series, tau, mu)?;
        let baseline = fit_normal(&sample)?;
        for &kind in &families {
            let fit = mle_fit(&sample, kind)?;
            let ks = ks_statistic(&sample, &fit.spec)?;
            let (alpha_cell, theta_cell) = match fit.spec.shape() {
                Some((a, t)) => (Value::Float(a), Value::Float(t)),
                // normal: report the per-day variance in the theta column
                None => (
                    Value::Empty,
                    Value::Float(fit.spec.variance_scale() / tau as f64),
                ),
            };
            fits_table.push(vec![
                Value::Int(tau as i64),
                Value::Str(kind.name().into()),
                alpha_cell,
                theta_cell,
                Value::Float(fit.log_likelihood),
                Value::Float(ks),
                Value::Bool(fit.converged),
            ]);
            if kind != DistKind::Normal {
                ll_table.push(vec![
                    Value::Int(tau as i64),
                    Value::Str(kind.name().into()),
                    Value::Float(ll_ratio(&fit, &baseline)?),
                    Value::Float(ll_diff(&fit, &baseline)),
                ]);
            }
        }
    }
    let fits_path = fits_table.write(&ctx.out_dir, "fits", ctx.format, &ctx.invocation)?;
    let ll_path = ll_table.write(&ctx.out_dir, "ll", ctx.format, &ctx.invocation)?;
    println!("wrote {}", fits_path.display());
    println!("wrote {}", ll_path.display());
    Ok(())
}

fn cmd_moments(
    ctx: &Ctx,
    input: Option<PathBuf>,
    taus: Option<String>,
    families: Option<String>,
    orders: Option<String>,
) -> Result<(), CliError> {
    let (series, mu) = load_series(ctx, input)?;
    let taus = resolve_taus(ctx, taus)?;
    let families = match families.or_else(|| ctx.config.str("families")) {
        Some(s) => parse_families(&s)?,
        None => vec![DistKind::HestonPd, DistKind::MultPd],
    };
    for kind in &families {
        if !matches!(kind, DistKind::HestonPd | DistKind::MultPd) {
            return Err(CliError::Validation(format!(
                "moment analysis compares the product families only (ga, iga), got `{kind}`"
            )));
        }
    }
    let orders: Option<Vec<u32>> = match orders.or_else(|| ctx.config.str("orders")) {
        Some(s) => Some(
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim().parse().map_err(|_| {
                        CliError::Validation(format!("bad moment half-order `{t}`"))
                    })
                })
                .collect::<Result<_, _>>()?,
        ),
        None => None,
    };

    for &kind in &families {
        // reference parameters: the tau = 1 maximum-likelihood fit
        let ref_sample = tau_returns(&series, 1, mu)?;
        let ref_fit = mle_fit(&ref_sample, kind)?;
        let (alpha, theta) = ref_fit.spec.shape().expect("shape family");
        println!(
            "{kind}: reference fit at tau=1: alpha {alpha:.6e}, theta {theta:.6e}, converged {}",
            ref_fit.converged
        );

        let ns: Vec<u32> = orders.clone().unwrap_or_else(|| match kind {
            DistKind::HestonPd => vec![1, 2, 3],
            _ => vec![1, 2],
        });

        let mut relax = Table::new(vec!["n", "a", "b", "residual_rms"]);
        for &n in &ns {
            let curve = moment_ratio_curve(&series, mu, kind, alpha, theta, n, &taus)?;
            let mut table = Table::new(vec!["tau", "ratio"]);
            for &(tau, ratio) in &curve {
                table.push(vec![Value::Int(tau as i64), Value::Float(ratio)]);
            }
            let path = table.write(
                &ctx.out_dir,
                &format!("ratios_{kind}_n{n}"),
                ctx.format,
                &ctx.invocation,
            )?;
            println!("wrote {}", path.display());

            let pts: Vec<(f64, f64)> = curve.iter().map(|&(t, r)| (t as f64, r)).collect();
            match fit_relaxation(n, &pts) {
                Ok(fit) => relax.push(vec![
                    Value::Int(n as i64),
                    Value::Float(fit.a),
                    Value::Float(fit.b),
                    Value::Float(fit.residual_rms),
                ]),
                Err(MomentError::DegenerateFit) => {
                    println!("{kind} n={n}: degenerate relaxation (flat curve, b = 0)");
                }
                Err(e) => return Err(e.into()),
            }
        }
        let path = relax.write(
            &ctx.out_dir,
            &format!("relaxation_{kind}"),
            ctx.format,
            &ctx.invocation,
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    ctx: &Ctx,
    family: Option<String>,
    gamma: Option<f64>,
    theta: Option<f64>,
    kappa: Option<f64>,
    alpha: Option<f64>,
    rho: Option<f64>,
    dt: Option<f64>,
    steps: Option<usize>,
    ito_drift: bool,
) -> Result<(), CliError> {
    let family = match family
        .or_else(|| ctx.config.str("family"))
        .ok_or_else(|| CliError::Validation("missing --family (ga or iga)".into()))?
        .as_str()
    {
        "ga" | "heston" => Family::Heston,
        "iga" | "multiplicative" => Family::Multiplicative,
        other => {
            return Err(CliError::Validation(format!(
                "unknown family `{other}` (expected ga or iga)"
            )))
        }
    };
    let gamma = gamma
        .or(ctx.config.f64("gamma")?)
        .ok_or_else(|| CliError::Validation("missing --gamma".into()))?;
    let theta = theta
        .or(ctx.config.f64("theta")?)
        .ok_or_else(|| CliError::Validation("missing --theta".into()))?;
    let rho = rho.or(ctx.config.f64("rho")?).unwrap_or(0.0);
    let params = match (kappa.or(ctx.config.f64("kappa")?), alpha.or(ctx.config.f64("alpha")?)) {
        (Some(k), None) => ModelParams::new(family, gamma, theta, k, rho)?,
        (None, Some(a)) => ModelParams::from_alpha(family, gamma, theta, a, rho)?,
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "give either --kappa or --alpha, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Validation("missing --kappa or --alpha".into()))
        }
    };
    let dt = dt.or(ctx.config.f64("dt")?).unwrap_or(0.1);
    let steps = steps
        .or(ctx.config.u64("steps")?.map(|v| v as usize))
        .unwrap_or(10_000);
    let ito_drift = ito_drift || ctx.config.bool("ito_drift")?.unwrap_or(false);

    let vpath = simulate_variance_path(&params, dt, steps, ctx.seed)?;
    let mut vtable = Table::new(vec!["step", "v"]);
    for (i, v) in vpath.values.iter().enumerate() {
        vtable.push(vec![Value::Int(i as i64), Value::Float(*v)]);
    }
    let vfile = vtable.write(&ctx.out_dir, "variance_path", ctx.format, &ctx.invocation)?;

    let (xs, vs) = simulate_log_return_path(&params, dt, steps, ctx.seed, ito_drift)?;
    let mut xtable = Table::new(vec!["step", "x", "v"]);
    for (i, (x, v)) in xs.iter().zip(&vs.values).enumerate() {
        xtable.push(vec![
            Value::Int(i as i64),
            Value::Float(*x),
            Value::Float(*v),
        ]);
    }
    let xfile = xtable.write(&ctx.out_dir, "return_path", ctx.format, &ctx.invocation)?;

    let mean_v = vpath.values.iter().sum::<f64>() / vpath.values.len() as f64;
    println!(
        "family {family}, alpha {:.4}, {} steps of dt {dt}",
        params.alpha(),
        steps
    );
    println!("mean simulated variance: {mean_v:.6e} (theta {theta:.6e})");
    println!("final log return: {:.6e}", xs.last().unwrap());
    println!("wrote {}", vfile.display());
    println!("wrote {}", xfile.display());
    Ok(())
}

#[allow(dead_code)]
fn debug_command() -> clap::Command {
    Cli::command()
}
