mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eiv_core::config::ConfigFile;
use eiv_core::diagnostics::{empirical_bn, ks_distance_to_normal, obrien_ratio, selfnorm_sum};
use eiv_core::inference::{ci_intercept, ci_slope_plugin, ci_slope_quadratic, QuadraticVariant};
use eiv_core::montecarlo::{run_experiment, run_experiment_with_workers};
use eiv_core::{estimate, simulate_dataset, EivError, InterceptFlag, SideInfo};
use serde_json::{json, Map, Value};

/// Environment variable holding the Monte Carlo worker count.
const WORKERS_VAR: &str = "EIV_WORKERS";

#[derive(Parser)]
#[command(name = "eiv", version, about = "Errors-in-variables regression: estimates, confidence intervals, simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modified least-squares slope and intercept from a "y,x" CSV.
    Estimate {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Confidence interval for the slope or intercept.
    Ci {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        /// Quadratic interval variant: 1 Studentized, 2 self-normalized.
        #[arg(long, default_value_t = 1)]
        k: u8,
    },
    /// Simulate a dataset from a model config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Destination of the "y,x" CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the latent "xi,delta,epsilon" CSV here.
        #[arg(long)]
        latent: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run a Monte Carlo experiment and write its JSON report.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Heavy-tail diagnostics of one numeric column.
    Diagnose {
        #[arg(long)]
        input: PathBuf,
        /// Column to read (default: the first).
        #[arg(long)]
        column: Option<String>,
        /// Centering constant of the self-normalized sum.
        #[arg(long, default_value_t = 0.0)]
        center: f64,
        /// Statistics to report.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Stat::Obrien, Stat::Bn, Stat::Selfnorm, Stat::Ks])]
        stats: Vec<Stat>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// CSV with header "y,x".
    #[arg(long)]
    input: PathBuf,
    /// Identification case: 1 (lambda_theta, mu known) or 2 (theta, mu known).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    case: u8,
    #[arg(long)]
    lambda_theta: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    mu: f64,
    /// The intercept is unknown and estimated (otherwise it is known to be zero).
    #[arg(long)]
    intercept: bool,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    PluginSlope,
    Intercept,
    Quadratic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Stat {
    Obrien,
    Bn,
    Selfnorm,
    Ks,
}

/// Why a command did not finish normally.
enum Failure {
    /// Bad input, flags or configuration.
    Input(anyhow::Error),
    /// An estimator guard or statistic is undefined on this data.
    Undefined(anyhow::Error),
    /// The interval is degenerate; its JSON has already been written.
    Degenerate,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

/// Classifies a library error by exit code.
fn core(e: EivError) -> Failure {
    match e {
        EivError::GuardViolation(_) | EivError::ZeroNormalizer(_) | EivError::Undefined(_) => {
            Failure::Undefined(e.into())
        }
        other => Failure::Input(other.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Undefined(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Degenerate) => ExitCode::from(4),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Estimate { data } => cmd_estimate(&data),
        Command::Ci { data, family, gamma, k } => cmd_ci(&data, family, gamma, k),
        Command::Simulate { config, out, latent, seed, n } => cmd_simulate(&config, out, latent, seed, n),
        Command::Experiment { config, out, seed, gamma, replications } => {
            cmd_experiment(&config, out, seed, gamma, replications)
        }
        Command::Diagnose { input, column, center, stats, output } => {
            cmd_diagnose(&input, column.as_deref(), center, &stats, output)
        }
    }
}

fn side_info(args: &DataArgs) -> Result<SideInfo, Failure> {
    let c = InterceptFlag::from_unknown(args.intercept);
    let side = if args.case == 1 {
        let lt = args.lambda_theta.ok_or_else(|| anyhow!("--case 1 needs --lambda-theta"))?;
        SideInfo::case1(lt, args.mu, c)
    } else {
        let theta = args.theta.ok_or_else(|| anyhow!("--case 2 needs --theta"))?;
        SideInfo::case2(theta, args.mu, c)
    };
    side.map_err(core)
}

fn cmd_estimate(args: &DataArgs) -> Result<(), Failure> {
    let side = side_info(args)?;
    let data = io::read_pairs(&args.input)?;
    let est = estimate(&data, &side).map_err(core)?;
    let mut out = Map::new();
    out.insert("n".into(), json!(data.len()));
    out.insert("j".into(), json!(est.case.j()));
    out.insert("beta_hat".into(), json!(est.beta_hat));
    if let Some(a) = est.alpha_hat {
        out.insert("alpha_hat".into(), json!(a));
    }
    out.insert("guards".into(), serde_json::to_value(est.guards).expect("guards serialize"));
    io::emit(&Value::Object(out), args.output.as_deref())?;
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<(), Failure> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Failure::Input(anyhow!("--gamma must lie in (0, 1), got {gamma}")))
    }
}

fn cmd_ci(args: &DataArgs, family: Family, gamma: f64, k: u8) -> Result<(), Failure> {
    check_gamma(gamma)?;
    let side = side_info(args)?;
    let data = io::read_pairs(&args.input)?;
    let ci = match family {
        Family::PluginSlope => ci_slope_plugin(&data, &side, gamma),
        Family::Intercept => ci_intercept(&data, &side, gamma),
        Family::Quadratic => {
            let variant = QuadraticVariant::from_k(k).map_err(core)?;
            ci_slope_quadratic(&data, &side, variant, gamma)
        }
    }
    .map_err(core)?;
    let mut out = serde_json::to_value(ci).expect("interval serializes");
    let obj = out.as_object_mut().expect("interval is an object");
    obj.insert("n".into(), json!(data.len()));
    obj.insert("j".into(), json!(side.case().j()));
    obj.insert("gamma".into(), json!(gamma));
    io::emit(&out, args.output.as_deref())?;
    if ci.is_degenerate() {
        let name = out["degeneracy"].as_str().unwrap_or_default().to_string();
        eprintln!("degenerate interval: {name}");
        return Err(Failure::Degenerate);
    }
    Ok(())
}

fn load_config(path: &std::path::Path) -> Result<ConfigFile, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    ConfigFile::from_json(&text).map_err(core)
}

fn cmd_simulate(
    config: &std::path::Path,
    out: Option<PathBuf>,
    latent: Option<PathBuf>,
    seed: Option<u64>,
    n: Option<usize>,
) -> Result<(), Failure> {
    let file = load_config(config)?;
    let spec = file.model_spec().map_err(core)?;
    let n = n.or(file.n).ok_or_else(|| anyhow!("row count missing: set \"n\" in the config or pass --n"))?;
    if n == 0 {
        return Err(Failure::Input(anyhow!("row count must be at least 1")));
    }
    let seed = seed.or(file.seed).unwrap_or(1);
    let data = simulate_dataset(&spec, n, seed).map_err(core)?;
    io::write_pairs(&data, out.as_deref())?;
    if let Some(path) = latent {
        io::write_latent(data.latent().expect("simulated data carries latent values"), &path)?;
    }
    Ok(())
}

fn cmd_experiment(
    config: &std::path::Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    gamma: Option<f64>,
    replications: Option<usize>,
) -> Result<(), Failure> {
    let mut file = load_config(config)?;
    if seed.is_some() {
        file.seed = seed;
    }
    if let Some(g) = gamma {
        check_gamma(g)?;
        file.gamma = Some(g);
    }
    if replications.is_some() {
        file.replications = replications;
    }
    let cfg = file.experiment_config().map_err(core)?;
    let report = match std::env::var(WORKERS_VAR) {
        Ok(v) => {
            let workers: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|w| *w > 0)
                .ok_or_else(|| anyhow!("{WORKERS_VAR} must be a positive integer, got {v:?}"))?;
            run_experiment_with_workers(&cfg, workers)
        }
        Err(_) => run_experiment(&cfg),
    }
    .map_err(|e| Failure::Input(e.into()))?;
    io::emit(&serde_json::to_value(&report).expect("report serializes"), out.as_deref())?;
    Ok(())
}

fn cmd_diagnose(
    input: &std::path::Path,
    column: Option<&str>,
    center: f64,
    stats: &[Stat],
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    let z = io::read_column(input, column)?;
    if z.is_empty() {
        return Err(Failure::Input(anyhow!("{} has no data rows", input.display())));
    }
    let mut out = Map::new();
    out.insert("n".into(), json!(z.len()));
    for stat in stats {
        let (key, value) = match stat {
            Stat::Obrien => ("obrien_ratio", json!(obrien_ratio(&z).map_err(core)?)),
            Stat::Bn => ("empirical_bn", json!(empirical_bn(&z).ok())),
            Stat::Selfnorm => ("selfnorm_stat", json!(selfnorm_sum(&z, center).ok())),
            Stat::Ks => ("ks_distance", json!(ks_distance_to_normal(&z).map_err(core)?)),
        };
        out.insert(key.into(), value);
    }
    io::emit(&Value::Object(out), output.as_deref())?;
    Ok(())
}
