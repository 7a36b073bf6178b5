//! Reproducible multivariate Gaussian and Student sampling with a prescribed
//! correlation structure.
//!
//! Normal variates come from the inverse CDF applied to splittable
//! counter-based uniforms (ChaCha8 streams), so a sample is a pure function
//! of `(seed, stream)` and replications can run on any thread schedule
//! without changing results. A Student observation divides one Gaussian
//! vector by a single chi-square draw shared across all coordinates, which
//! keeps the contours elliptical — the property the arcsine law rests on.

use std::path::PathBuf;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CenteringMode, CorrelationMatrix, SampleMatrix};
use crate::normal;

/// Distribution family of the generated observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Gaussian,
    /// Multivariate Student with `nu` degrees of freedom. Heavy-tailed for
    /// small `nu`; `nu = 3` is the conventional heavy-tail benchmark.
    Student { nu: f64 },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Gaussian => "gaussian".to_string(),
            Family::Student { nu } => format!("student(nu={nu})"),
        }
    }
}

/// Everything that determines a generated sample: family, correlation
/// structure, and the master seed.
#[derive(Debug, Clone)]
pub struct DistributionSpec {
    pub family: Family,
    pub sigma: CorrelationMatrix,
    pub seed: u64,
}

impl DistributionSpec {
    pub fn gaussian(sigma: CorrelationMatrix, seed: u64) -> Self {
        DistributionSpec {
            family: Family::Gaussian,
            sigma,
            seed,
        }
    }

    pub fn student(sigma: CorrelationMatrix, nu: f64, seed: u64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::OutOfDomain {
                what: "nu",
                value: nu,
                domain: "(0, inf)",
            });
        }
        Ok(DistributionSpec {
            family: Family::Student { nu },
            sigma,
            seed,
        })
    }
}

/// Which correlation matrix to build.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaKind {
    /// Mutually uncorrelated variables.
    Identity,
    /// Every off-diagonal entry equal to the given correlation.
    Equicorrelated(f64),
    /// Load from a plain-CSV matrix file and validate.
    FromFile(PathBuf),
}

/// Builds one of the standard correlation matrices.
///
/// For [`SigmaKind::FromFile`] the file's dimension must equal `n`.
pub fn make_sigma(kind: &SigmaKind, n: usize) -> Result<CorrelationMatrix> {
    match kind {
        SigmaKind::Identity => CorrelationMatrix::identity(n),
        SigmaKind::Equicorrelated(rho) => CorrelationMatrix::equicorrelated(n, *rho),
        SigmaKind::FromFile(path) => {
            let sigma = CorrelationMatrix::read_csv(path)?;
            if sigma.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: sigma.dim(),
                    right: n,
                });
            }
            Ok(sigma)
        }
    }
}

/// Draws one sample matrix; equivalent to `Sampler::new(spec)?.replicate(0, n)`.
pub fn sample(spec: &DistributionSpec, n: usize) -> Result<SampleMatrix> {
    Ok(Sampler::new(spec)?.replicate(0, n))
}

/// Gaussian sample: columns i.i.d. `N(0, sigma)`.
pub fn sample_gaussian(spec: &DistributionSpec, n: usize) -> Result<SampleMatrix> {
    match spec.family {
        Family::Gaussian => sample(spec, n),
        Family::Student { .. } => Err(Error::OutOfDomain {
            what: "family",
            value: f64::NAN,
            domain: "gaussian",
        }),
    }
}

/// Student sample: columns i.i.d. multivariate-t with shape `sigma`.
pub fn sample_student(spec: &DistributionSpec, n: usize) -> Result<SampleMatrix> {
    match spec.family {
        Family::Student { .. } => sample(spec, n),
        Family::Gaussian => Err(Error::OutOfDomain {
            what: "family",
            value: f64::NAN,
            domain: "student",
        }),
    }
}

/// Reusable sampler: factors the correlation matrix once and then generates
/// independent replications keyed by stream index.
#[derive(Debug, Clone)]
pub struct Sampler {
    family: Family,
    seed: u64,
    dim: usize,
    lower: Vec<f64>, // Cholesky factor, row-major lower triangle
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Self> {
        if let Family::Student { nu } = spec.family {
            if !(nu > 0.0) {
                return Err(Error::OutOfDomain {
                    what: "nu",
                    value: nu,
                    domain: "(0, inf)",
                });
            }
        }
        let chol = spec.sigma.cholesky();
        let dim = spec.sigma.dim();
        let mut lower = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                lower[i * dim + j] = chol.get(i, j);
            }
        }
        Ok(Sampler {
            family: spec.family,
            seed: spec.seed,
            dim,
            lower,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generates the sample for one replication. Distinct streams are
    /// statistically independent; the same `(seed, stream, n)` always
    /// produces bit-identical output.
    pub fn replicate(&self, stream: u64, n: usize) -> SampleMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let dim = self.dim;
        let mut values = vec![0.0f64; dim * n];
        let mut z = vec![0.0f64; dim];
        for t in 0..n {
            for zi in z.iter_mut() {
                *zi = standard_normal(&mut rng);
            }
            let scale = match self.family {
                Family::Gaussian => 1.0,
                Family::Student { nu } => {
                    let w = chi_square(&mut rng, nu);
                    (nu / w).sqrt()
                }
            };
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..=i {
                    acc += self.lower[i * dim + j] * z[j];
                }
                values[i * n + t] = acc * scale;
            }
        }
        SampleMatrix::from_flat(dim, n, values, CenteringMode::KnownZeroMean)
    }
}

/// Uniform in the open interval `(0, 1)`: 53 random bits offset by half a
/// step, so 0 and 1 are unreachable.
#[inline]
fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Standard normal by inverse CDF; one uniform per variate.
#[inline]
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    normal::quantile(uniform_open01(rng))
}

/// Chi-square with `nu > 0` degrees of freedom (`nu` need not be integral).
fn chi_square(rng: &mut ChaCha8Rng, nu: f64) -> f64 {
    2.0 * gamma_sample(rng, 0.5 * nu)
}

/// Gamma(shape, scale 1) by Marsaglia-Tsang squeeze, boosted below shape 1.
fn gamma_sample(rng: &mut ChaCha8Rng, shape: f64) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let boost = uniform_open01(rng).powf(1.0 / shape);
        return gamma_sample(rng, shape + 1.0) * boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let v = {
            let b = 1.0 + c * x;
            b * b * b
        };
        if v <= 0.0 {
            continue;
        }
        let u = uniform_open01(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}
