//! `market-graph`: identify market graphs from return data and reproduce
//! the sign-similarity vs Pearson risk-function comparison.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 interrupted or partially completed experiment. Failures print one
//! machine-parseable line to stderr: `error: <config|data|partial>: <reason>`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use market_graph::graph::CenteringMode;
use market_graph_cli::config::{
    parse_procedures, parse_sigma, preset_runs, ExperimentConfig, LevelSpec, ALL_PRESETS,
};
use market_graph_cli::experiment::{
    install_interrupt_handler, run_identify, run_risk_experiment, run_transform, validate_sigma,
    Method, Transform,
};
use market_graph_cli::Failure;

#[derive(Parser)]
#[command(
    name = "market-graph",
    version,
    about = "Market graph identification in sign similarity and Pearson correlation networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identify the market graph from a returns CSV.
    Identify(IdentifyArgs),
    /// Estimate risk curves over a threshold grid by Monte Carlo.
    Risk(RiskArgs),
    /// Evaluate one of the scalar transforms and print the value.
    Transform(TransformArgs),
    /// Validate a correlation matrix file.
    ValidateSigma(ValidateArgs),
}

#[derive(Args)]
struct IdentifyArgs {
    /// Returns CSV: one observation row per date, one column per instrument,
    /// optional ticker header and date column.
    #[arg(long)]
    input: PathBuf,
    /// Identification procedure.
    #[arg(long, value_parser = ["sign", "pearson"])]
    method: String,
    /// Sign-probability threshold p0 in (0, 1). The pearson method converts
    /// it to the equivalent correlation rho0 = sin(pi (p0 - 1/2)).
    #[arg(long)]
    threshold: f64,
    /// Per-edge significance level in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Centering convention for the observations.
    #[arg(long, default_value = "sample-mean", value_parser = ["known-zero-mean", "sample-mean"])]
    centering: String,
    /// Output directory for adjacency.csv and edges.txt.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RiskArgs {
    /// Figure presets to run: fig1..fig6, comma-separated, or "all".
    #[arg(long)]
    preset: Option<String>,
    /// Experiment config file (flat key = value; see the guide).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write an SVG plot per run.
    #[arg(long)]
    svg: bool,
    /// Worker threads for the Monte Carlo sweep (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Override: master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override: replications per grid point.
    #[arg(long)]
    replications: Option<usize>,
    /// Override: Student degrees of freedom.
    #[arg(long)]
    nu: Option<f64>,
    /// Override: pair counting convention (unordered | ordered).
    #[arg(long)]
    pair_counting: Option<String>,
    /// Override: significance level (sets the loss pair (1 - alpha, alpha)).
    #[arg(long)]
    alpha: Option<f64>,
    /// Override: matrix (identity | equicorrelated:<rho> | file:<path>).
    #[arg(long)]
    sigma: Option<String>,
    /// Override: distribution family (gaussian | student).
    #[arg(long)]
    family: Option<String>,
    /// Override: procedures to run (comma-separated: sign,pearson).
    #[arg(long)]
    procedures: Option<String>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(subcommand)]
    which: TransformCommand,
}

#[derive(Subcommand)]
enum TransformCommand {
    /// p = 1/2 + arcsin(rho)/pi.
    RhoToP { rho: f64 },
    /// rho = sin(pi (p - 1/2)).
    PToRho { p: f64 },
    /// Minimal c with the Binomial(n, p0) upper tail at c below alpha.
    CriticalValue {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p0: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Inverse standard normal CDF at q.
    NormalQuantile { q: f64 },
}

#[derive(Args)]
struct ValidateArgs {
    /// Correlation matrix CSV to validate.
    #[arg(long)]
    input: PathBuf,
}

fn centering_from(name: &str) -> CenteringMode {
    match name {
        "known-zero-mean" => CenteringMode::KnownZeroMean,
        _ => CenteringMode::SampleMean,
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, args: &RiskArgs) -> Result<(), Failure> {
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    if let Some(nu) = args.nu {
        cfg.nu = nu;
    }
    if let Some(alpha) = args.alpha {
        cfg.level = LevelSpec::Alpha(alpha);
    }
    if let Some(sigma) = &args.sigma {
        cfg.sigma = parse_sigma(sigma)?;
    }
    if let Some(procs) = &args.procedures {
        cfg.procedures = parse_procedures(procs)?;
    }
    if let Some(family) = &args.family {
        cfg.gaussian = match family.as_str() {
            "gaussian" => true,
            "student" => false,
            other => {
                return Err(Failure::Config(format!(
                    "unknown family {other:?} (expected gaussian or student)"
                )))
            }
        };
    }
    if let Some(counting) = &args.pair_counting {
        cfg.pair_counting = match counting.as_str() {
            "unordered" => market_graph::risk::PairCounting::Unordered,
            "ordered" => market_graph::risk::PairCounting::Ordered,
            other => {
                return Err(Failure::Config(format!(
                    "unknown pair counting {other:?} (expected unordered or ordered)"
                )))
            }
        };
    }
    Ok(())
}

fn risk_command(args: &RiskArgs) -> Result<(), Failure> {
    let mut runs: Vec<ExperimentConfig> = match (&args.preset, &args.config) {
        (Some(_), Some(_)) => {
            return Err(Failure::Config(
                "give either --preset or --config, not both".to_string(),
            ))
        }
        (Some(presets), None) => {
            let names: Vec<&str> = if presets == "all" {
                ALL_PRESETS.to_vec()
            } else {
                presets.split(',').map(str::trim).collect()
            };
            let mut runs = Vec::new();
            for name in names {
                runs.extend(preset_runs(name, &args.out_dir)?);
            }
            runs
        }
        (None, Some(path)) => vec![ExperimentConfig::from_config_file(path)?],
        (None, None) => vec![ExperimentConfig::default()],
    };
    for cfg in &mut runs {
        apply_overrides(cfg, args)?;
    }
    let outputs = run_risk_experiment(&runs, &args.out_dir, args.svg, args.threads)?;
    for out in outputs {
        let peaks: Vec<String> = out
            .max_risk_per_procedure
            .iter()
            .map(|(name, r)| format!("{name}={r:.2}"))
            .collect();
        println!(
            "{}: wrote {} (max risk: {})",
            out.label,
            out.csv.display(),
            peaks.join(", ")
        );
    }
    Ok(())
}

fn real_main() -> Result<(), Failure> {
    install_interrupt_handler();
    let cli = Cli::parse();
    match cli.command {
        Command::Identify(args) => {
            let method = if args.method == "sign" {
                Method::Sign
            } else {
                Method::Pearson
            };
            let edges = run_identify(
                &args.input,
                method,
                args.threshold,
                args.alpha,
                centering_from(&args.centering),
                &args.out_dir,
            )?;
            println!("edges={edges}");
            Ok(())
        }
        Command::Risk(args) => risk_command(&args),
        Command::Transform(args) => {
            let t = match args.which {
                TransformCommand::RhoToP { rho } => Transform::RhoToP(rho),
                TransformCommand::PToRho { p } => Transform::PToRho(p),
                TransformCommand::CriticalValue { n, p0, alpha } => {
                    Transform::CriticalValue { n, p0, alpha }
                }
                TransformCommand::NormalQuantile { q } => Transform::NormalQuantile(q),
            };
            println!("{}", run_transform(t)?);
            Ok(())
        }
        Command::ValidateSigma(args) => {
            println!("{}", validate_sigma(&args.input)?);
            Ok(())
        }
    }
}

fn main() {
    if let Err(failure) = real_main() {
        eprintln!("{failure}");
        std::process::exit(failure.exit_code());
    }
}
