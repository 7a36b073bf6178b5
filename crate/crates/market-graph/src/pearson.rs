//! The reference identification procedure for Pearson correlation networks:
//! zero-mean sample correlation, Fisher z statistic against a threshold
//! correlation, and the normal-quantile critical value.

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, SampleMatrix};
use crate::normal;
use crate::AlphaSpec;

/// Inverse standard normal CDF on the open interval `(0, 1)`.
///
/// Absolute error is a few ulps (contract: at most 1e-8 on
/// `[1e-12, 1 - 1e-12]`), and the function is antisymmetric about `q = 1/2`.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutOfDomain {
            what: "q",
            value: q,
            domain: "(0, 1)",
        });
    }
    Ok(normal::quantile(q))
}

/// Standard normal CDF. Companion of [`normal_quantile`].
pub fn normal_cdf(x: f64) -> f64 {
    normal::cdf(x)
}

/// `atanh` with exact odd symmetry, which the platform libm does not
/// guarantee; keeps `fisher_statistic(r, rho0, n) == -fisher_statistic(-r,
/// -rho0, n)` an identity.
#[inline]
pub(crate) fn atanh_odd(x: f64) -> f64 {
    if x < 0.0 {
        -(-x).atanh()
    } else {
        x.atanh()
    }
}

/// Sample Pearson correlation with known zero means:
/// `r = sum(x y) / sqrt(sum(x^2) sum(y^2))`, no mean subtraction.
///
/// Callers working under the sample-mean convention center first (see
/// `SampleMatrix::centered`). The result is clamped to `[-1, 1]` against
/// rounding.
pub fn sample_correlation_zero_mean(x_i: &[f64], x_j: &[f64]) -> Result<f64> {
    if x_i.len() != x_j.len() {
        return Err(Error::LengthMismatch {
            left: x_i.len(),
            right: x_j.len(),
        });
    }
    if x_i.len() < 2 {
        return Err(Error::TooFew {
            what: "observations",
            min: 2,
            got: x_i.len(),
        });
    }
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x_i.iter().zip(x_j) {
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateSeries { index: 0 });
    }
    if syy == 0.0 {
        return Err(Error::DegenerateSeries { index: 1 });
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fisher z statistic for testing `rho <= rho0`:
/// `z = sqrt(n) (atanh(r) - atanh(rho0))`.
///
/// Strictly increasing in `r`; `|r| = 1` is reported as an infinite
/// statistic and resolved by the caller from the sign of `r`.
pub fn fisher_statistic(r: f64, rho0: f64, n: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            domain: "[-1, 1]",
        });
    }
    if r.abs() == 1.0 {
        return Err(Error::InfiniteStatistic);
    }
    if !(rho0 > -1.0 && rho0 < 1.0) {
        return Err(Error::OutOfDomain {
            what: "rho0",
            value: rho0,
            domain: "(-1, 1)",
        });
    }
    if n == 0 {
        return Err(Error::TooFew {
            what: "observations",
            min: 1,
            got: 0,
        });
    }
    Ok((n as f64).sqrt() * (atanh_odd(r) - atanh_odd(rho0)))
}

/// Parameters of one Pearson edge test: reject iff `z > c`, where `c` is
/// the `(1 - alpha)`-quantile of the standard normal law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonTestSpec {
    pub rho0: f64,
    pub alpha: f64,
    pub n: usize,
    /// Critical value `normal_quantile(1 - alpha)`.
    pub c: f64,
}

impl PearsonTestSpec {
    pub fn new(rho0: f64, alpha: f64, n: usize) -> Result<Self> {
        if !(rho0 > -1.0 && rho0 < 1.0) {
            return Err(Error::OutOfDomain {
                what: "rho0",
                value: rho0,
                domain: "(-1, 1)",
            });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfDomain {
                what: "alpha",
                value: alpha,
                domain: "(0, 1)",
            });
        }
        Ok(PearsonTestSpec {
            rho0,
            alpha,
            n,
            c: normal::quantile(1.0 - alpha),
        })
    }

    /// Edge decision given a sample correlation, resolving `|r| = 1` by its
    /// sign: `r = 1` is a certain rejection for any `rho0 < 1`, `r = -1` a
    /// certain acceptance.
    pub fn decide(&self, r: f64) -> bool {
        if r >= 1.0 {
            true
        } else if r <= -1.0 {
            false
        } else {
            (self.n as f64).sqrt() * (atanh_odd(r) - atanh_odd(self.rho0)) > self.c
        }
    }
}

/// Identifies the market graph with the Pearson procedure at threshold
/// correlation `rho0`; per-edge significance as in [`crate::AlphaSpec`].
pub fn identify_pearson(
    sample: &SampleMatrix,
    rho0: f64,
    alpha: &AlphaSpec,
) -> Result<AdjacencyMatrix> {
    let dim = sample.series_count();
    alpha.check(dim)?;
    if !(rho0 > -1.0 && rho0 < 1.0) {
        return Err(Error::OutOfDomain {
            what: "rho0",
            value: rho0,
            domain: "(-1, 1)",
        });
    }
    let data = sample.centered();
    let n = data.sample_size();
    let r = correlation_statistics(&data)?;
    let mut graph = AdjacencyMatrix::empty(dim);
    let mut idx = 0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let spec = PearsonTestSpec::new(rho0, alpha.get(i, j), n)?;
            graph.set_edge(i, j, spec.decide(r[idx]));
            idx += 1;
        }
    }
    Ok(graph)
}

/// Zero-mean sample correlations for every pair `(i, j)`, `i < j`, in
/// row-major upper-triangle order. Shared with the risk sweep.
pub(crate) fn correlation_statistics(sample: &SampleMatrix) -> Result<Vec<f64>> {
    let dim = sample.series_count();
    let norms: Vec<f64> = (0..dim)
        .map(|i| sample.series(i).iter().map(|x| x * x).sum::<f64>())
        .collect();
    if let Some(i) = norms.iter().position(|&s| s == 0.0) {
        return Err(Error::DegenerateSeries { index: i });
    }
    let mut out = Vec::with_capacity(dim * (dim - 1) / 2);
    for i in 0..dim {
        let xi = sample.series(i);
        for j in (i + 1)..dim {
            let xj = sample.series(j);
            let sxy: f64 = xi.iter().zip(xj).map(|(&a, &b)| a * b).sum();
            out.push((sxy / (norms[i] * norms[j]).sqrt()).clamp(-1.0, 1.0));
        }
    }
    Ok(out)
}
