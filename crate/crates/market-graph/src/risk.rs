//! Additive loss, the loss-to-significance link, and Monte Carlo risk
//! estimation over a threshold grid.
//!
//! The loss of deciding graph `Q` when `S` is true adds `a[i][j]` for every
//! falsely included edge and `b[i][j]` for every falsely excluded one. A
//! per-edge test run at significance `alpha = b/(a+b)` minimizes this risk
//! among unbiased procedures, so the sweep derives each procedure's levels
//! from the loss specification.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    correlation_from_sign_prob, reference_graph, AdjacencyMatrix, SignProbabilityMatrix,
};
use crate::sampling::{DistributionSpec, Sampler};
use crate::{normal, pearson, sign};

/// One loss weight per edge, or one for all.
#[derive(Debug, Clone)]
pub enum LossValues {
    Scalar(f64),
    PerEdge(crate::matrix::SquareMatrix),
}

impl LossValues {
    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            LossValues::Scalar(v) => *v,
            LossValues::PerEdge(m) => m.get(i, j),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        match self {
            LossValues::Scalar(v) => {
                if !(*v >= 0.0) || !v.is_finite() {
                    return Err(Error::OutOfDomain {
                        what: "loss",
                        value: *v,
                        domain: "[0, inf)",
                    });
                }
            }
            LossValues::PerEdge(m) => {
                if m.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        left: m.dim(),
                        right: dim,
                    });
                }
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        let v = m.get(i, j);
                        if !(v >= 0.0) || !v.is_finite() {
                            return Err(Error::OutOfDomain {
                                what: "loss",
                                value: v,
                                domain: "[0, inf)",
                            });
                        }
                        if (v - m.get(j, i)).abs() > 0.0 {
                            return Err(Error::Asymmetric {
                                i,
                                j,
                                a: v,
                                b: m.get(j, i),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Whether each unordered pair is counted once or twice.
///
/// Unordered counting (the default) charges each edge once; ordered counting
/// reproduces the double sum over all `(i, j)` with `i != j` and exactly
/// doubles the unordered value for symmetric weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairCounting {
    #[default]
    Unordered,
    Ordered,
}

/// Loss specification: false-inclusion weights `a`, false-exclusion weights
/// `b`, and the pair-counting convention.
#[derive(Debug, Clone)]
pub struct LossSpec {
    pub a: LossValues,
    pub b: LossValues,
    pub pair_counting: PairCounting,
}

impl LossSpec {
    /// Uniform weights across all edges.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let spec = LossSpec {
            a: LossValues::Scalar(a),
            b: LossValues::Scalar(b),
            pair_counting: PairCounting::Unordered,
        };
        spec.a.check(2)?;
        spec.b.check(2)?;
        if a == 0.0 && b == 0.0 {
            return Err(Error::OutOfDomain {
                what: "a + b",
                value: 0.0,
                domain: "(0, inf)",
            });
        }
        Ok(spec)
    }

    /// The loss pair `(1 - alpha, alpha)` whose induced significance level
    /// is exactly `alpha`. This is the convention behind "run everything at
    /// level alpha": penalize misses in proportion to the level itself.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfDomain {
                what: "alpha",
                value: alpha,
                domain: "(0, 1)",
            });
        }
        Self::uniform(1.0 - alpha, alpha)
    }

    pub fn with_counting(mut self, pair_counting: PairCounting) -> Self {
        self.pair_counting = pair_counting;
        self
    }

    /// Significance level induced for edge `(i, j)`.
    pub fn alpha(&self, i: usize, j: usize) -> Result<f64> {
        alpha_from_losses(self.a.get(i, j), self.b.get(i, j))
    }

    fn check(&self, dim: usize) -> Result<()> {
        self.a.check(dim)?;
        self.b.check(dim)?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                if self.a.get(i, j) == 0.0 && self.b.get(i, j) == 0.0 {
                    return Err(Error::OutOfDomain {
                        what: "a + b",
                        value: 0.0,
                        domain: "(0, inf)",
                    });
                }
            }
        }
        Ok(())
    }

    /// Whether a single `(a, b)` pair applies to every edge.
    fn scalar_pair(&self) -> Option<(f64, f64)> {
        match (&self.a, &self.b) {
            (LossValues::Scalar(a), LossValues::Scalar(b)) => Some((*a, *b)),
            _ => None,
        }
    }
}

/// The significance level `b / (a + b)` induced by positive loss weights.
pub fn alpha_from_losses(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::OutOfDomain {
            what: "a",
            value: a,
            domain: "(0, inf)",
        });
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::OutOfDomain {
            what: "b",
            value: b,
            domain: "(0, inf)",
        });
    }
    Ok(b / (a + b))
}

/// Additive loss of deciding `q` when `s` is true; zero iff the graphs
/// agree (for positive weights).
pub fn loss(s: &AdjacencyMatrix, q: &AdjacencyMatrix, spec: &LossSpec) -> Result<f64> {
    if s.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: q.dim(),
        });
    }
    spec.check(s.dim())?;
    let mut total = 0.0;
    for i in 0..s.dim() {
        for j in (i + 1)..s.dim() {
            match (s.edge(i, j), q.edge(i, j)) {
                (false, true) => total += spec.a.get(i, j),
                (true, false) => total += spec.b.get(i, j),
                _ => {}
            }
        }
    }
    Ok(match spec.pair_counting {
        PairCounting::Unordered => total,
        PairCounting::Ordered => 2.0 * total,
    })
}

/// Which identification procedures a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcedureKind {
    Sign,
    Pearson,
}

impl ProcedureKind {
    pub fn label(&self) -> &'static str {
        match self {
            ProcedureKind::Sign => "sign",
            ProcedureKind::Pearson => "pearson",
        }
    }
}

/// One grid point of an estimated risk curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskPoint {
    pub p0: f64,
    /// Mean loss across replications.
    pub risk: f64,
    /// Monte Carlo standard error (sample std / sqrt(R)); zero when fewer
    /// than two replications succeeded.
    pub stderr: f64,
}

/// Estimated risk as a function of the threshold, for one procedure.
#[derive(Debug, Clone)]
pub struct RiskCurve {
    pub procedure: ProcedureKind,
    pub points: Vec<RiskPoint>,
    /// Replications that produced a decision.
    pub replications: usize,
    /// Replications skipped because a procedure failed (degenerate data);
    /// counted, never silently dropped.
    pub failures: usize,
    /// Distribution summary, e.g. "gaussian" or "student(nu=3)".
    pub family: String,
    pub sample_size: usize,
    pub seed: u64,
}

impl RiskCurve {
    pub fn max_risk(&self) -> f64 {
        self.points.iter().map(|p| p.risk).fold(0.0, f64::max)
    }
}

/// Writes curves in the stable CSV schema:
/// `p0,procedure,risk,stderr,replications`, one row per grid point and
/// procedure.
pub fn write_risk_csv<W: std::io::Write>(curves: &[RiskCurve], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "p0,procedure,risk,stderr,replications")?;
    for curve in curves {
        for p in &curve.points {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{}",
                p.p0,
                curve.procedure.label(),
                p.risk,
                p.stderr,
                curve.replications
            )?;
        }
    }
    Ok(())
}

/// Per-edge sign critical values at one grid point.
enum SignCrits {
    Uniform(u64),
    PerEdge(Vec<u64>),
}

/// Per-edge Pearson decision thresholds on the `atanh(r)` scale at one grid
/// point: edge iff `atanh(r) > threshold`, with `r = 1` mapping to
/// `+infinity` (certain inclusion) and `r = -1` to `-infinity`.
enum PearsonCuts {
    Uniform(f64),
    PerEdge(Vec<f64>),
}

/// Estimates risk curves for the requested procedures over a threshold grid
/// by Monte Carlo.
///
/// The reference graph at each grid point is the population object computed
/// from `dist.sigma` through the arcsine transform, never estimated from
/// data. Each replication draws one sample (stream = replication index) and
/// the same sample feeds every grid point and both procedures — a
/// common-random-numbers scheme that pairs the comparison and leaves every
/// single point's estimate unbiased. Significance levels come from the loss
/// weights via `alpha = b/(a+b)`; the Pearson procedure tests at the
/// equivalent correlation threshold `rho0 = sin(pi (p0 - 1/2))`.
///
/// Replications run in parallel; results are reduced in replication order,
/// so curves are identical for any thread count.
pub fn risk_sweep(
    dist: &DistributionSpec,
    n: usize,
    grid: &[f64],
    loss_spec: &LossSpec,
    procedures: &[ProcedureKind],
    replications: usize,
) -> Result<Vec<RiskCurve>> {
    let dim = dist.sigma.dim();
    let pairs = dim * (dim - 1) / 2;
    loss_spec.check(dim)?;
    if replications == 0 {
        return Err(Error::TooFew {
            what: "replications",
            min: 1,
            got: 0,
        });
    }
    if grid.is_empty() {
        return Err(Error::TooFew {
            what: "grid points",
            min: 1,
            got: 0,
        });
    }
    for &p0 in grid {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::OutOfDomain {
                what: "p0",
                value: p0,
                domain: "(0, 1)",
            });
        }
    }

    // population truth per grid point, flattened to upper-triangle bits
    let pmat = SignProbabilityMatrix::from_correlation(&dist.sigma);
    let truths: Vec<Vec<bool>> = grid
        .iter()
        .map(|&p0| {
            let g = reference_graph(&pmat, p0).expect("grid validated");
            flatten_upper(&g)
        })
        .collect();

    // per-edge (a, b) weights and significance levels
    let scalar_pair = loss_spec.scalar_pair();
    let mut alphas = Vec::with_capacity(pairs);
    let mut weights = Vec::with_capacity(pairs);
    for i in 0..dim {
        for j in (i + 1)..dim {
            alphas.push(loss_spec.alpha(i, j)?);
            weights.push((loss_spec.a.get(i, j), loss_spec.b.get(i, j)));
        }
    }

    let want_sign = procedures.contains(&ProcedureKind::Sign);
    let want_pearson = procedures.contains(&ProcedureKind::Pearson);

    // critical values and thresholds, memoized across the grid before the
    // parallel stage
    let sign_crits: Vec<SignCrits> = if want_sign {
        grid.iter()
            .map(|&p0| match scalar_pair {
                Some((a, b)) => Ok(SignCrits::Uniform(sign::critical_value(
                    n as u64,
                    p0,
                    alpha_from_losses(a, b)?,
                )?)),
                None => {
                    let cs = alphas
                        .iter()
                        .map(|&al| sign::critical_value(n as u64, p0, al))
                        .collect::<Result<Vec<u64>>>()?;
                    Ok(SignCrits::PerEdge(cs))
                }
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let pearson_cuts: Vec<PearsonCuts> = if want_pearson {
        let sqrt_n = (n as f64).sqrt();
        grid.iter()
            .map(|&p0| {
                let rho0 = correlation_from_sign_prob(p0).expect("grid validated");
                let base = pearson::atanh_odd(rho0);
                match scalar_pair {
                    Some((a, b)) => {
                        let c = normal::quantile(1.0 - alpha_from_losses(a, b)?);
                        Ok(PearsonCuts::Uniform(base + c / sqrt_n))
                    }
                    None => Ok(PearsonCuts::PerEdge(
                        alphas
                            .iter()
                            .map(|&al| base + normal::quantile(1.0 - al) / sqrt_n)
                            .collect(),
                    )),
                }
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let sampler = Sampler::new(dist)?;
    let ordered = loss_spec.pair_counting == PairCounting::Ordered;

    struct RepOutcome {
        // losses[g] = (sign loss, pearson loss) at grid point g
        losses: Vec<(f64, f64)>,
        failed: bool,
    }

    let outcomes: Vec<RepOutcome> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let sample = sampler.replicate(rep as u64, n);
            let v_stats = if want_sign {
                sign::sign_statistics(&sample)
            } else {
                Vec::new()
            };
            let atanh_r = if want_pearson {
                match pearson::correlation_statistics(&sample) {
                    Ok(rs) => rs
                        .iter()
                        .map(|&r| {
                            if r >= 1.0 {
                                f64::INFINITY
                            } else if r <= -1.0 {
                                f64::NEG_INFINITY
                            } else {
                                pearson::atanh_odd(r)
                            }
                        })
                        .collect(),
                    Err(_) => {
                        return RepOutcome {
                            losses: Vec::new(),
                            failed: true,
                        }
                    }
                }
            } else {
                Vec::new()
            };
            let factor = if ordered { 2.0 } else { 1.0 };
            let losses = (0..grid.len())
                .map(|g| {
                    let truth = &truths[g];
                    let mut l_sign = 0.0;
                    let mut l_pearson = 0.0;
                    if want_sign {
                        let crits = &sign_crits[g];
                        for (m, &v) in v_stats.iter().enumerate() {
                            let c = match crits {
                                SignCrits::Uniform(c) => *c,
                                SignCrits::PerEdge(cs) => cs[m],
                            };
                            let decided = v > c;
                            l_sign += misclassification(truth[m], decided, weights[m]);
                        }
                    }
                    if want_pearson {
                        let cuts = &pearson_cuts[g];
                        for (m, &at) in atanh_r.iter().enumerate() {
                            let cut = match cuts {
                                PearsonCuts::Uniform(c) => *c,
                                PearsonCuts::PerEdge(cs) => cs[m],
                            };
                            let decided = at > cut;
                            l_pearson += misclassification(truth[m], decided, weights[m]);
                        }
                    }
                    (l_sign * factor, l_pearson * factor)
                })
                .collect();
            RepOutcome {
                losses,
                failed: false,
            }
        })
        .collect();

    let failures = outcomes.iter().filter(|o| o.failed).count();
    let successes = replications - failures;
    if successes == 0 {
        return Err(Error::TooFew {
            what: "successful replications",
            min: 1,
            got: 0,
        });
    }

    let mut curves = Vec::new();
    for &proc_kind in procedures {
        let pick = |l: &(f64, f64)| match proc_kind {
            ProcedureKind::Sign => l.0,
            ProcedureKind::Pearson => l.1,
        };
        let points = grid
            .iter()
            .enumerate()
            .map(|(g, &p0)| {
                let mut mean = 0.0;
                for o in outcomes.iter().filter(|o| !o.failed) {
                    mean += pick(&o.losses[g]);
                }
                mean /= successes as f64;
                let stderr = if successes > 1 {
                    let mut ss = 0.0;
                    for o in outcomes.iter().filter(|o| !o.failed) {
                        let d = pick(&o.losses[g]) - mean;
                        ss += d * d;
                    }
                    (ss / (successes as f64 - 1.0)).sqrt() / (successes as f64).sqrt()
                } else {
                    0.0
                };
                RiskPoint {
                    p0,
                    risk: mean,
                    stderr,
                }
            })
            .collect();
        curves.push(RiskCurve {
            procedure: proc_kind,
            points,
            replications: successes,
            failures,
            family: dist.family.label(),
            sample_size: n,
            seed: dist.seed,
        });
    }
    Ok(curves)
}

#[inline]
fn misclassification(truth: bool, decided: bool, (a, b): (f64, f64)) -> f64 {
    match (truth, decided) {
        (false, true) => a,
        (true, false) => b,
        _ => 0.0,
    }
}

fn flatten_upper(g: &AdjacencyMatrix) -> Vec<bool> {
    let dim = g.dim();
    let mut out = Vec::with_capacity(dim * (dim - 1) / 2);
    for i in 0..dim {
        for j in (i + 1)..dim {
            out.push(g.edge(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CorrelationMatrix;
    use crate::matrix::SquareMatrix;

    fn complete(n: usize) -> AdjacencyMatrix {
        AdjacencyMatrix::complete(n)
    }

    fn one_edge(n: usize) -> AdjacencyMatrix {
        let mut g = AdjacencyMatrix::empty(n);
        g.set_edge(0, 1, true);
        g
    }

    #[test]
    fn loss_zero_on_agreement() {
        let g = one_edge(3);
        let spec = LossSpec::uniform(1.0, 1.0).unwrap();
        assert_eq!(loss(&g, &g, &spec).unwrap(), 0.0);
    }

    #[test]
    fn loss_counts_false_inclusions() {
        // empty truth, complete decision: three false inclusions at unit loss
        let spec = LossSpec::uniform(1.0, 1.0).unwrap();
        let total = loss(&AdjacencyMatrix::empty(3), &complete(3), &spec).unwrap();
        assert_eq!(total, 3.0);
    }

    #[test]
    fn loss_counts_false_exclusions_with_weight() {
        // complete truth, one-edge decision: two false exclusions at b = 2
        let spec = LossSpec::uniform(1.0, 2.0).unwrap();
        let total = loss(&complete(3), &one_edge(3), &spec).unwrap();
        assert_eq!(total, 4.0);
    }

    #[test]
    fn ordered_counting_doubles() {
        let spec = LossSpec::uniform(1.0, 2.0)
            .unwrap()
            .with_counting(PairCounting::Ordered);
        let total = loss(&complete(3), &one_edge(3), &spec).unwrap();
        assert_eq!(total, 8.0);
    }

    #[test]
    fn loss_dimension_mismatch() {
        let spec = LossSpec::uniform(1.0, 1.0).unwrap();
        assert!(matches!(
            loss(&complete(3), &complete(4), &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn alpha_link_arithmetic() {
        assert_eq!(alpha_from_losses(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(alpha_from_losses(9.0, 1.0).unwrap(), 0.1);
        assert_eq!(alpha_from_losses(1.0, 3.0).unwrap(), 0.75);
        assert!(alpha_from_losses(0.0, 1.0).is_err());
        assert!(alpha_from_losses(1.0, -0.5).is_err());
    }

    #[test]
    fn from_alpha_round_trips() {
        for alpha in [0.5, 0.1, 0.25, 0.9] {
            let spec = LossSpec::from_alpha(alpha).unwrap();
            assert!((spec.alpha(0, 1).unwrap() - alpha).abs() < 1e-15);
        }
    }

    #[test]
    fn per_edge_losses_must_be_symmetric() {
        let mut m = SquareMatrix::filled(3, 1.0);
        m.set(0, 1, 2.0);
        let spec = LossSpec {
            a: LossValues::PerEdge(m),
            b: LossValues::Scalar(1.0),
            pair_counting: PairCounting::Unordered,
        };
        assert!(matches!(
            loss(&complete(3), &one_edge(3), &spec),
            Err(Error::Asymmetric { .. })
        ));
    }

    fn quick_sweep(seed: u64, reps: usize) -> Vec<RiskCurve> {
        let dist = DistributionSpec::gaussian(CorrelationMatrix::identity(6).unwrap(), seed);
        risk_sweep(
            &dist,
            100,
            &[0.3, 0.5, 0.7],
            &LossSpec::from_alpha(0.1).unwrap(),
            &[ProcedureKind::Sign, ProcedureKind::Pearson],
            reps,
        )
        .unwrap()
    }

    #[test]
    fn sweep_is_reproducible() {
        let a = quick_sweep(7, 40);
        let b = quick_sweep(7, 40);
        for (ca, cb) in a.iter().zip(&b) {
            assert_eq!(ca.points, cb.points);
        }
    }

    #[test]
    fn sweep_risk_within_bounds() {
        let curves = quick_sweep(3, 40);
        let pairs = 15.0; // C(6, 2)
        for c in &curves {
            for p in &c.points {
                assert!(p.risk >= 0.0 && p.risk <= pairs * 0.9);
                assert!(p.stderr >= 0.0);
            }
        }
    }

    #[test]
    fn sweep_far_threshold_risk_is_negligible() {
        // independent variables, threshold far above 0.5: false inclusions
        // need a binomial tail event of astronomically small probability
        let dist = DistributionSpec::gaussian(CorrelationMatrix::identity(10).unwrap(), 19);
        let curves = risk_sweep(
            &dist,
            400,
            &[0.9],
            &LossSpec::from_alpha(0.1).unwrap(),
            &[ProcedureKind::Sign],
            200,
        )
        .unwrap();
        let p = &curves[0].points[0];
        assert!(
            p.risk <= 3.0 * p.stderr + 1e-12,
            "risk {} not within 3 stderr of 0",
            p.risk
        );
    }

    #[test]
    fn independent_runs_agree_within_error() {
        // same configuration, different seeds: estimates differ by at most
        // 3 combined standard errors (checked at a threshold with real
        // error mass so stderr is nonzero)
        let run = |seed| {
            let dist = DistributionSpec::gaussian(CorrelationMatrix::identity(6).unwrap(), seed);
            risk_sweep(
                &dist,
                100,
                &[0.5],
                &LossSpec::from_alpha(0.5).unwrap(),
                &[ProcedureKind::Sign],
                300,
            )
            .unwrap()[0]
                .points[0]
        };
        let a = run(101);
        let b = run(202);
        let tol = 3.0 * (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
        assert!(
            (a.risk - b.risk).abs() <= tol,
            "{} vs {} (tol {tol})",
            a.risk,
            b.risk
        );
    }

    #[test]
    fn unbiasedness_direction_of_the_sign_test() {
        // per-edge risk at the true hypothesis is at most the risk computed
        // against the flipped hypothesis, within Monte Carlo error
        use crate::sampling::sample;
        let rho = 0.5; // p = 2/3 > p0
        let p0 = 0.6;
        let (a, b) = (3.0, 1.0); // alpha = 0.25
        let alpha = alpha_from_losses(a, b).unwrap();
        let n = 200u64;
        let c = sign::critical_value(n, p0, alpha).unwrap();
        let reps = 4000;
        let sigma = CorrelationMatrix::equicorrelated(2, rho).unwrap();
        let mut rejects = 0usize;
        for rep in 0..reps {
            let spec = DistributionSpec::gaussian(sigma.clone(), 5000 + rep as u64);
            let x = sample(&spec, n as usize).unwrap();
            let v = sign::sign_counts(x.series(0), x.series(1)).unwrap().v;
            if v > c {
                rejects += 1;
            }
        }
        let p_reject = rejects as f64 / reps as f64;
        let se = (p_reject * (1.0 - p_reject) / reps as f64).sqrt();
        // truth s = 1 (edge): risk = b P(miss); flipped s' = 0: a P(reject)
        let risk_true = b * (1.0 - p_reject);
        let risk_flipped = a * p_reject;
        assert!(
            risk_true <= risk_flipped + 3.0 * (a + b) * se,
            "unbiasedness direction violated: {risk_true} vs {risk_flipped}"
        );
    }

    #[test]
    fn csv_schema() {
        let curves = quick_sweep(1, 5);
        let mut buf = Vec::new();
        write_risk_csv(&curves, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "p0,procedure,risk,stderr,replications");
        // 3 grid points x 2 procedures
        assert_eq!(lines.count(), 6);
        assert!(text.contains(",sign,"));
        assert!(text.contains(",pearson,"));
    }

    #[test]
    fn additivity_of_graph_loss() {
        // the loss of a full-graph decision equals the sum of per-edge
        // losses: exact structural identity
        use crate::graph::{CenteringMode, SampleMatrix};
        use crate::AlphaSpec;
        let spec = LossSpec::uniform(1.0, 2.0).unwrap();
        let truth = one_edge(3);
        for seed in 0..20u64 {
            let rows: Vec<Vec<f64>> = (0..3)
                .map(|i| {
                    (0..50)
                        .map(|t| (((seed as usize + i) * 37 + t * 13) % 19) as f64 - 9.0)
                        .collect()
                })
                .collect();
            let sample = SampleMatrix::from_rows(&rows, CenteringMode::KnownZeroMean).unwrap();
            let decided = sign::identify_sign(&sample, 0.5, &AlphaSpec::Scalar(0.3)).unwrap();
            let total = loss(&truth, &decided, &spec).unwrap();
            let mut per_edge = 0.0;
            for i in 0..3 {
                for j in (i + 1)..3 {
                    per_edge += misclassification(
                        truth.edge(i, j),
                        decided.edge(i, j),
                        (1.0, 2.0),
                    );
                }
            }
            assert_eq!(total, per_edge);
        }
    }
}
