//! Orchestration of the CLI subcommands: identification runs, risk-curve
//! experiments with per-run metadata, value transforms, and matrix
//! validation.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use market_graph::graph::CenteringMode;
use market_graph::ingest::load_returns_csv;
use market_graph::plot::risk_curves_svg;
use market_graph::risk::{risk_sweep, write_risk_csv, RiskCurve};
use market_graph::sampling::{make_sigma, DistributionSpec, SigmaKind};
use market_graph::{
    correlation_from_sign_prob, pearson, sign, sign_prob_from_correlation, AlphaSpec,
    CorrelationMatrix, Error, SquareMatrix,
};

use crate::config::{ExperimentConfig, LevelSpec, SIGMA2_ROLE_CSV, SIGMA2_ROLE_FILE};
use crate::Failure;

/// Set by the SIGINT handler; checked between experiment runs so partial
/// results are flushed and marked rather than torn.
pub static INTERRUPTED: AtomicBool = AtomicBool::new(false);

pub fn install_interrupt_handler() {
    unsafe extern "C" fn on_sigint(_: libc::c_int) {
        INTERRUPTED.store(true, Ordering::SeqCst);
    }
    unsafe {
        libc::signal(libc::SIGINT, on_sigint as *const () as usize);
    }
}

/// Which procedure an identification run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sign,
    Pearson,
}

/// Classifies library errors into exit-code categories: bad parameters are
/// configuration errors, bad input files are data errors.
fn data_error(e: Error) -> Failure {
    Failure::Data(e.to_string())
}

fn config_error(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

/// Runs one identification: reads a returns CSV, applies the chosen
/// procedure at threshold `p0`, writes the adjacency matrix and edge list,
/// and returns the edge count.
///
/// For the Pearson method the threshold is converted to the equivalent
/// correlation `rho0 = sin(pi (p0 - 1/2))`, so both methods share the
/// sign-probability threshold scale.
pub fn run_identify(
    input: &Path,
    method: Method,
    p0: f64,
    alpha: f64,
    centering: CenteringMode,
    out_dir: &Path,
) -> Result<usize, Failure> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Failure::Config(format!(
            "threshold = {p0} outside the open interval (0, 1)"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Failure::Config(format!(
            "alpha = {alpha} outside the open interval (0, 1)"
        )));
    }
    let table = load_returns_csv(input).map_err(data_error)?;
    if table.dropped_rows > 0 {
        eprintln!(
            "note: dropped {} observation row(s) with missing cells",
            table.dropped_rows
        );
    }
    let sample = table.to_sample(centering).map_err(data_error)?;
    let graph = match method {
        Method::Sign => {
            sign::identify_sign(&sample, p0, &AlphaSpec::Scalar(alpha)).map_err(data_error)?
        }
        Method::Pearson => {
            let rho0 = correlation_from_sign_prob(p0).expect("threshold validated");
            pearson::identify_pearson(&sample, rho0, &AlphaSpec::Scalar(alpha))
                .map_err(data_error)?
        }
    };
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Data(format!("{}: {e}", out_dir.display())))?;
    let adjacency = out_dir.join("adjacency.csv");
    let edges = out_dir.join("edges.txt");
    graph.write_csv(&adjacency).map_err(data_error)?;
    graph.write_edge_list(&edges).map_err(data_error)?;
    Ok(graph.edge_count())
}

/// Resolves the configured matrix, materializing the bundled Σ₂-role file
/// into the output directory when a preset references it.
fn resolve_sigma(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CorrelationMatrix, Failure> {
    if let SigmaKind::FromFile(path) = &cfg.sigma {
        if path == &out_dir.join(SIGMA2_ROLE_FILE) && !path.exists() {
            std::fs::write(path, SIGMA2_ROLE_CSV)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        }
    }
    let sigma = match &cfg.sigma {
        SigmaKind::FromFile(path) => {
            let sigma = CorrelationMatrix::read_csv(path).map_err(data_error)?;
            if sigma.jitter_applied() {
                eprintln!(
                    "note: {} needed the diagonal jitter to factor",
                    path.display()
                );
            }
            sigma
        }
        kind => make_sigma(kind, cfg.n_series).map_err(config_error)?,
    };
    Ok(sigma)
}

fn distribution(cfg: &ExperimentConfig, sigma: CorrelationMatrix) -> Result<DistributionSpec, Failure> {
    if cfg.gaussian {
        Ok(DistributionSpec::gaussian(sigma, cfg.seed))
    } else {
        DistributionSpec::student(sigma, cfg.nu, cfg.seed).map_err(config_error)
    }
}

/// Files produced by one experiment run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub label: String,
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub metadata: PathBuf,
    pub max_risk_per_procedure: Vec<(String, f64)>,
}

/// Executes one configured run and writes `<label>.csv`, optional
/// `<label>.svg`, and `<label>.meta.txt` into `out_dir`.
pub fn run_one(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    svg: bool,
) -> Result<(RunOutput, Vec<RiskCurve>), Failure> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Data(format!("{}: {e}", out_dir.display())))?;
    let sigma = resolve_sigma(cfg, out_dir)?;
    if sigma.dim() != cfg.n_series {
        return Err(Failure::Config(format!(
            "n_series = {} but the matrix has dimension {}",
            cfg.n_series,
            sigma.dim()
        )));
    }
    let dist = distribution(cfg, sigma)?;
    let grid = cfg.grid()?;
    let loss_spec = cfg.level.to_loss_spec(cfg.pair_counting)?;
    let curves = risk_sweep(
        &dist,
        cfg.sample_size,
        &grid,
        &loss_spec,
        &cfg.procedures,
        cfg.replications,
    )
    .map_err(config_error)?;

    let csv_path = out_dir.join(format!("{}.csv", cfg.label));
    let mut buf = Vec::new();
    write_risk_csv(&curves, &mut buf)
        .map_err(|e| Failure::Data(format!("{}: {e}", csv_path.display())))?;
    std::fs::write(&csv_path, &buf)
        .map_err(|e| Failure::Data(format!("{}: {e}", csv_path.display())))?;

    let svg_path = if svg {
        let title = format!(
            "{} ({}, {})",
            cfg.label,
            cfg.family_label(),
            match &cfg.level {
                LevelSpec::Alpha(a) => format!("alpha = {a}"),
                LevelSpec::Losses { a, b } => format!("a = {a}, b = {b}"),
            }
        );
        let path = out_dir.join(format!("{}.svg", cfg.label));
        std::fs::write(&path, risk_curves_svg(&curves, &title))
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        Some(path)
    } else {
        None
    };

    let meta_path = out_dir.join(format!("{}.meta.txt", cfg.label));
    std::fs::write(&meta_path, cfg.to_config_string(env!("CARGO_PKG_VERSION")))
        .map_err(|e| Failure::Data(format!("{}: {e}", meta_path.display())))?;

    let max_risk = curves
        .iter()
        .map(|c| (c.procedure.label().to_string(), c.max_risk()))
        .collect();
    Ok((
        RunOutput {
            label: cfg.label.clone(),
            csv: csv_path,
            svg: svg_path,
            metadata: meta_path,
            max_risk_per_procedure: max_risk,
        },
        curves,
    ))
}

/// Runs a list of experiments, flushing each run's files as it completes.
/// On interruption or a mid-list failure after partial output, a `FAILED`
/// marker naming the reason is left in the output directory.
pub fn run_risk_experiment(
    runs: &[ExperimentConfig],
    out_dir: &Path,
    svg: bool,
    threads: usize,
) -> Result<Vec<RunOutput>, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    let mut outputs = Vec::new();
    for cfg in runs {
        if INTERRUPTED.load(Ordering::SeqCst) {
            return Err(partial(out_dir, "interrupted", &outputs));
        }
        match pool.install(|| run_one(cfg, out_dir, svg)) {
            Ok((output, _)) => outputs.push(output),
            Err(failure) => {
                if outputs.is_empty() {
                    return Err(failure);
                }
                return Err(partial(out_dir, &failure.message(), &outputs));
            }
        }
    }
    Ok(outputs)
}

fn partial(out_dir: &Path, reason: &str, done: &[RunOutput]) -> Failure {
    let labels: Vec<&str> = done.iter().map(|o| o.label.as_str()).collect();
    let body = format!(
        "reason: {reason}\ncompleted: {}\n",
        if labels.is_empty() {
            "none".to_string()
        } else {
            labels.join(",")
        }
    );
    let _ = std::fs::write(out_dir.join("FAILED"), body);
    Failure::Partial(reason.to_string())
}

/// Value transforms exposed on the command line.
#[derive(Debug, Clone, Copy)]
pub enum Transform {
    RhoToP(f64),
    PToRho(f64),
    CriticalValue { n: u64, p0: f64, alpha: f64 },
    NormalQuantile(f64),
}

/// Evaluates a transform; the result is printed at full precision.
pub fn run_transform(t: Transform) -> Result<String, Failure> {
    match t {
        Transform::RhoToP(rho) => sign_prob_from_correlation(rho)
            .map(|p| format!("{p}"))
            .map_err(config_error),
        Transform::PToRho(p) => correlation_from_sign_prob(p)
            .map(|rho| format!("{rho}"))
            .map_err(config_error),
        Transform::CriticalValue { n, p0, alpha } => sign::critical_value(n, p0, alpha)
            .map(|c| format!("{c}"))
            .map_err(config_error),
        Transform::NormalQuantile(q) => pearson::normal_quantile(q)
            .map(|x| format!("{x}"))
            .map_err(config_error),
    }
}

/// Validates a correlation matrix file; returns a one-line summary.
pub fn validate_sigma(path: &Path) -> Result<String, Failure> {
    let raw = SquareMatrix::read_csv(path).map_err(data_error)?;
    let sigma = CorrelationMatrix::validate(raw).map_err(data_error)?;
    Ok(format!(
        "ok dim={} jitter_applied={}",
        sigma.dim(),
        sigma.jitter_applied()
    ))
}
