//! Experiment configuration: a flat `key = value` file format with one run
//! per config, command-line overrides, and the `fig1`..`fig6` presets that
//! reproduce the published risk-curve figures.
//!
//! Every emitted metadata file is itself a valid config, so any experiment
//! can be rerun exactly with `risk --config <label>.meta.txt`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use market_graph::risk::{LossSpec, PairCounting, ProcedureKind};
use market_graph::sampling::SigmaKind;

use crate::Failure;

/// How the per-edge significance level is specified: directly, or through
/// the loss pair it derives from (`alpha = b / (a + b)`).
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSpec {
    /// Level `alpha`, equivalent to the loss pair `(1 - alpha, alpha)`.
    Alpha(f64),
    /// Explicit false-inclusion / false-exclusion weights.
    Losses { a: f64, b: f64 },
}

impl LevelSpec {
    pub fn to_loss_spec(&self, counting: PairCounting) -> Result<LossSpec, Failure> {
        let spec = match self {
            LevelSpec::Alpha(alpha) => LossSpec::from_alpha(*alpha),
            LevelSpec::Losses { a, b } => LossSpec::uniform(*a, *b),
        }
        .map_err(|e| Failure::Config(e.to_string()))?;
        Ok(spec.with_counting(counting))
    }
}

/// One risk experiment: one matrix, one family, one level, one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: String,
    pub n_series: usize,
    pub sample_size: usize,
    pub gaussian: bool,
    pub nu: f64,
    pub sigma: SigmaKind,
    pub level: LevelSpec,
    pub grid_start: f64,
    pub grid_stop: f64,
    pub grid_step: f64,
    pub replications: usize,
    pub seed: u64,
    pub procedures: Vec<ProcedureKind>,
    pub pair_counting: PairCounting,
}

impl Default for ExperimentConfig {
    /// The published experiment's parameters: 30 series, 400 observations,
    /// level 0.5, grid 0.02..0.98 in steps of 0.02, 500 replications.
    fn default() -> Self {
        ExperimentConfig {
            label: "risk".to_string(),
            n_series: 30,
            sample_size: 400,
            gaussian: true,
            nu: 3.0,
            sigma: SigmaKind::Identity,
            level: LevelSpec::Alpha(0.5),
            grid_start: 0.02,
            grid_stop: 0.98,
            grid_step: 0.02,
            replications: 500,
            seed: 20130,
            procedures: vec![ProcedureKind::Sign, ProcedureKind::Pearson],
            pair_counting: PairCounting::Unordered,
        }
    }
}

impl ExperimentConfig {
    /// The threshold grid, each point rounded to 10 decimals so values like
    /// 0.28 print cleanly.
    pub fn grid(&self) -> Result<Vec<f64>, Failure> {
        if !(self.grid_step > 0.0) {
            return Err(Failure::Config(format!(
                "grid_step = {} must be positive",
                self.grid_step
            )));
        }
        if self.grid_start > self.grid_stop {
            return Err(Failure::Config(format!(
                "grid_start = {} exceeds grid_stop = {}",
                self.grid_start, self.grid_stop
            )));
        }
        let mut grid = Vec::new();
        let mut k = 0u32;
        loop {
            let p0 = self.grid_start + k as f64 * self.grid_step;
            if p0 > self.grid_stop + 1e-12 {
                break;
            }
            let p0 = (p0 * 1e10).round() / 1e10;
            if !(p0 > 0.0 && p0 < 1.0) {
                return Err(Failure::Config(format!(
                    "grid point {p0} outside the open interval (0, 1)"
                )));
            }
            grid.push(p0);
            k += 1;
        }
        if grid.is_empty() {
            return Err(Failure::Config("empty threshold grid".to_string()));
        }
        Ok(grid)
    }

    pub fn family_label(&self) -> &'static str {
        if self.gaussian {
            "gaussian"
        } else {
            "student"
        }
    }

    /// Renders the flat `key = value` form (also used as metadata).
    pub fn to_config_string(&self, version: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# reproducible experiment description");
        let _ = writeln!(out, "version = {version}");
        let _ = writeln!(out, "label = {}", self.label);
        let _ = writeln!(out, "n_series = {}", self.n_series);
        let _ = writeln!(out, "sample_size = {}", self.sample_size);
        let _ = writeln!(out, "family = {}", self.family_label());
        let _ = writeln!(out, "nu = {}", self.nu);
        let sigma = match &self.sigma {
            SigmaKind::Identity => "identity".to_string(),
            SigmaKind::Equicorrelated(rho) => format!("equicorrelated:{rho}"),
            SigmaKind::FromFile(p) => format!("file:{}", p.display()),
        };
        let _ = writeln!(out, "sigma = {sigma}");
        match &self.level {
            LevelSpec::Alpha(a) => {
                let _ = writeln!(out, "alpha = {a}");
            }
            LevelSpec::Losses { a, b } => {
                let _ = writeln!(out, "loss_a = {a}");
                let _ = writeln!(out, "loss_b = {b}");
            }
        }
        let _ = writeln!(out, "grid_start = {}", self.grid_start);
        let _ = writeln!(out, "grid_stop = {}", self.grid_stop);
        let _ = writeln!(out, "grid_step = {}", self.grid_step);
        let _ = writeln!(out, "replications = {}", self.replications);
        let _ = writeln!(out, "seed = {}", self.seed);
        let procs: Vec<&str> = self.procedures.iter().map(|p| p.label()).collect();
        let _ = writeln!(out, "procedures = {}", procs.join(","));
        let counting = match self.pair_counting {
            PairCounting::Unordered => "unordered",
            PairCounting::Ordered => "ordered",
        };
        let _ = writeln!(out, "pair_counting = {counting}");
        out
    }

    /// Parses the flat format; unknown keys are configuration errors.
    pub fn from_config_str(text: &str) -> Result<Self, Failure> {
        let mut cfg = ExperimentConfig::default();
        let mut alpha: Option<f64> = None;
        let mut loss_a: Option<f64> = None;
        let mut loss_b: Option<f64> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Failure::Config(format!("line {}: bad {what}: {value:?}", lineno + 1))
            };
            match key {
                "version" => {} // informational
                "label" => cfg.label = value.to_string(),
                "n_series" => cfg.n_series = value.parse().map_err(|_| bad("integer"))?,
                "sample_size" => cfg.sample_size = value.parse().map_err(|_| bad("integer"))?,
                "family" => {
                    cfg.gaussian = match value {
                        "gaussian" => true,
                        "student" => false,
                        _ => return Err(bad("family (gaussian|student)")),
                    }
                }
                "nu" => cfg.nu = value.parse().map_err(|_| bad("number"))?,
                "sigma" => cfg.sigma = parse_sigma(value)?,
                "alpha" => alpha = Some(value.parse().map_err(|_| bad("number"))?),
                "loss_a" => loss_a = Some(value.parse().map_err(|_| bad("number"))?),
                "loss_b" => loss_b = Some(value.parse().map_err(|_| bad("number"))?),
                "grid_start" => cfg.grid_start = value.parse().map_err(|_| bad("number"))?,
                "grid_stop" => cfg.grid_stop = value.parse().map_err(|_| bad("number"))?,
                "grid_step" => cfg.grid_step = value.parse().map_err(|_| bad("number"))?,
                "replications" => {
                    cfg.replications = value.parse().map_err(|_| bad("integer"))?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("integer"))?,
                "procedures" => cfg.procedures = parse_procedures(value)?,
                "pair_counting" => {
                    cfg.pair_counting = match value {
                        "unordered" => PairCounting::Unordered,
                        "ordered" => PairCounting::Ordered,
                        _ => return Err(bad("pair_counting (unordered|ordered)")),
                    }
                }
                other => {
                    return Err(Failure::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.level = match (alpha, loss_a, loss_b) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(Failure::Config(
                    "give either alpha or the loss_a/loss_b pair, not both".to_string(),
                ))
            }
            (Some(a), None, None) => LevelSpec::Alpha(a),
            (None, Some(a), Some(b)) => LevelSpec::Losses { a, b },
            (None, None, None) => cfg.level,
            _ => {
                return Err(Failure::Config(
                    "loss_a and loss_b must be given together".to_string(),
                ))
            }
        };
        Ok(cfg)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        Self::from_config_str(&text)
    }
}

pub fn parse_sigma(value: &str) -> Result<SigmaKind, Failure> {
    if value == "identity" {
        return Ok(SigmaKind::Identity);
    }
    if let Some(rho) = value.strip_prefix("equicorrelated:") {
        let rho: f64 = rho
            .parse()
            .map_err(|_| Failure::Config(format!("bad correlation in sigma: {value:?}")))?;
        return Ok(SigmaKind::Equicorrelated(rho));
    }
    if let Some(path) = value.strip_prefix("file:") {
        return Ok(SigmaKind::FromFile(PathBuf::from(path)));
    }
    Err(Failure::Config(format!(
        "sigma must be identity, equicorrelated:<rho> or file:<path>, got {value:?}"
    )))
}

pub fn parse_procedures(value: &str) -> Result<Vec<ProcedureKind>, Failure> {
    let mut out = Vec::new();
    for part in value.split(',') {
        match part.trim() {
            "sign" => out.push(ProcedureKind::Sign),
            "pearson" => out.push(ProcedureKind::Pearson),
            other => {
                return Err(Failure::Config(format!(
                    "unknown procedure {other:?} (expected sign, pearson)"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Failure::Config("no procedures given".to_string()));
    }
    Ok(out)
}

/// The bundled moderate-correlation matrix used by the `fig3`/`fig4`
/// presets: thirty instruments in two sectors (within-sector correlation
/// 0.55, cross-sector 0.35). It stands in for a correlation matrix estimated
/// from real index constituents; pass `sigma = file:<path>` to use your own.
pub const SIGMA2_ROLE_CSV: &str = include_str!("../data/sigma2_role.csv");

/// File name the Σ₂-role matrix is materialized under in the output
/// directory.
pub const SIGMA2_ROLE_FILE: &str = "sigma2_role.csv";

/// Expands a figure preset into its Gaussian and Student runs.
///
/// `fig1`/`fig2`: identity matrix at levels 0.5 / 0.1; `fig3`/`fig4`: the
/// bundled two-sector matrix; `fig5`/`fig6`: equicorrelated 0.9.
pub fn preset_runs(name: &str, out_dir: &Path) -> Result<Vec<ExperimentConfig>, Failure> {
    let (sigma, alpha) = match name {
        "fig1" => (SigmaKind::Identity, 0.5),
        "fig2" => (SigmaKind::Identity, 0.1),
        "fig3" => (sigma2_role_kind(out_dir), 0.5),
        "fig4" => (sigma2_role_kind(out_dir), 0.1),
        "fig5" => (SigmaKind::Equicorrelated(0.9), 0.5),
        "fig6" => (SigmaKind::Equicorrelated(0.9), 0.1),
        other => {
            return Err(Failure::Config(format!(
                "unknown preset {other:?} (expected fig1..fig6 or all)"
            )))
        }
    };
    let mut runs = Vec::new();
    for gaussian in [true, false] {
        let mut cfg = ExperimentConfig {
            label: format!("{name}_{}", if gaussian { "gaussian" } else { "student" }),
            gaussian,
            sigma: sigma.clone(),
            level: LevelSpec::Alpha(alpha),
            ..ExperimentConfig::default()
        };
        // keep the two panels of one figure on the same replication streams
        cfg.seed = ExperimentConfig::default().seed;
        runs.push(cfg);
    }
    Ok(runs)
}

fn sigma2_role_kind(out_dir: &Path) -> SigmaKind {
    SigmaKind::FromFile(out_dir.join(SIGMA2_ROLE_FILE))
}

/// All preset names, in figure order.
pub const ALL_PRESETS: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];
