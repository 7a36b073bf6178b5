//! Core domain types: correlation matrices, sign-coincidence probability
//! matrices, adjacency matrices, observation samples, and the arcsine
//! transform that links correlations to sign-coincidence probabilities.

use std::borrow::Cow;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{CholeskyFactor, SquareMatrix};

/// Tolerance for symmetry and unit-diagonal checks during validation.
pub const VALIDATION_TOL: f64 = 1e-12;

/// Converts a correlation to the probability that two centered variables
/// share a sign: `p = 1/2 + arcsin(rho)/pi`.
///
/// Holds exactly for any elliptically contoured distribution, Gaussian and
/// Student included, and is strictly increasing in `rho`.
pub fn sign_prob_from_correlation(rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::OutOfDomain {
            what: "rho",
            value: rho,
            domain: "[-1, 1]",
        });
    }
    Ok(0.5 + rho.asin() / std::f64::consts::PI)
}

/// Inverse of [`sign_prob_from_correlation`]: `rho = sin(pi (p - 1/2))`.
pub fn correlation_from_sign_prob(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfDomain {
            what: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    Ok((std::f64::consts::PI * (p - 0.5)).sin())
}

/// A validated correlation matrix: symmetric, unit diagonal, entries in
/// `[-1, 1]`, and positive semidefinite up to the documented diagonal jitter.
///
/// Validation symmetrizes to `(A + Aᵀ)/2` and pins the diagonal to exactly 1
/// after the tolerance checks pass, so stored entries satisfy the invariants
/// exactly.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: SquareMatrix,
    chol: CholeskyFactor,
}

impl CorrelationMatrix {
    /// Validates a raw square matrix as a correlation matrix.
    ///
    /// The returned error names the first violated property, checked in the
    /// order: finiteness, symmetry, unit diagonal, range, positive
    /// semidefiniteness. Whether the PSD check needed the jitter retry is
    /// reported by [`CorrelationMatrix::jitter_applied`].
    pub fn validate(raw: SquareMatrix) -> Result<Self> {
        let n = raw.dim();
        if n < 2 {
            return Err(Error::TooFew {
                what: "matrix rows",
                min: 2,
                got: n,
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = raw.get(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j, value: v });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (raw.get(i, j), raw.get(j, i));
                if (a - b).abs() > VALIDATION_TOL {
                    return Err(Error::Asymmetric { i, j, a, b });
                }
            }
        }
        for i in 0..n {
            let v = raw.get(i, i);
            if (v - 1.0).abs() > VALIDATION_TOL {
                return Err(Error::NonUnitDiagonal { i, value: v });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let v = raw.get(i, j);
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::EntryOutOfRange {
                        i,
                        j,
                        value: v,
                        lo: -1.0,
                        hi: 1.0,
                    });
                }
            }
        }
        let mut entries = raw;
        for i in 0..n {
            entries.set(i, i, 1.0);
            for j in (i + 1)..n {
                let v = 0.5 * (entries.get(i, j) + entries.get(j, i));
                entries.set(i, j, v);
                entries.set(j, i, v);
            }
        }
        let chol = CholeskyFactor::new(&entries)?;
        Ok(CorrelationMatrix { entries, chol })
    }

    /// The identity correlation matrix (mutually uncorrelated variables).
    pub fn identity(n: usize) -> Result<Self> {
        Self::validate(SquareMatrix::identity(n))
    }

    /// Equicorrelated matrix with every off-diagonal entry equal to `rho`.
    ///
    /// Requires `-1/(n-1) < rho < 1`; outside that range the matrix is not
    /// positive semidefinite (its smallest eigenvalue `1 + (n-1) rho` or
    /// `1 - rho` is negative).
    pub fn equicorrelated(n: usize, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFew {
                what: "matrix rows",
                min: 2,
                got: n,
            });
        }
        if rho >= 1.0 || 1.0 + (n as f64 - 1.0) * rho <= 0.0 {
            return Err(Error::NotPositiveSemidefinite {
                jitter: crate::matrix::JITTER,
            });
        }
        let mut m = SquareMatrix::filled(n, rho);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        Self::validate(m)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::validate(SquareMatrix::read_csv(path)?)
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    pub fn entries(&self) -> &SquareMatrix {
        &self.entries
    }

    /// Whether the PSD check succeeded only after the one-shot diagonal jitter.
    pub fn jitter_applied(&self) -> bool {
        self.chol.jitter_applied
    }

    pub(crate) fn cholesky(&self) -> &CholeskyFactor {
        &self.chol
    }
}

/// Matrix of pairwise sign-coincidence probabilities.
///
/// Symmetric with entries in `[0, 1]`. The diagonal is fixed to 1 by
/// convention (a continuous variable almost surely shares a sign with
/// itself); no operation ever reads it.
#[derive(Debug, Clone, PartialEq)]
pub struct SignProbabilityMatrix {
    entries: SquareMatrix,
}

impl SignProbabilityMatrix {
    /// Validates symmetry (within tolerance) and the `[0, 1]` range, then
    /// symmetrizes and pins the diagonal to 1.
    pub fn validate(raw: SquareMatrix) -> Result<Self> {
        let n = raw.dim();
        for i in 0..n {
            for j in 0..n {
                let v = raw.get(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j, value: v });
                }
                if i != j && !(0.0..=1.0).contains(&v) {
                    return Err(Error::EntryOutOfRange {
                        i,
                        j,
                        value: v,
                        lo: 0.0,
                        hi: 1.0,
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (raw.get(i, j), raw.get(j, i));
                if (a - b).abs() > VALIDATION_TOL {
                    return Err(Error::Asymmetric { i, j, a, b });
                }
            }
        }
        let mut entries = raw;
        for i in 0..n {
            entries.set(i, i, 1.0);
            for j in (i + 1)..n {
                let v = 0.5 * (entries.get(i, j) + entries.get(j, i));
                entries.set(i, j, v);
                entries.set(j, i, v);
            }
        }
        Ok(SignProbabilityMatrix { entries })
    }

    /// Applies the arcsine transform entrywise to a correlation matrix.
    pub fn from_correlation(sigma: &CorrelationMatrix) -> Self {
        let n = sigma.dim();
        let mut m = SquareMatrix::filled(n, 1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                // entries are validated to [-1, 1], so this cannot fail
                let p = sign_prob_from_correlation(sigma.get(i, j)).expect("validated entry");
                m.set(i, j, p);
                m.set(j, i, p);
            }
        }
        SignProbabilityMatrix { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    pub fn entries(&self) -> &SquareMatrix {
        &self.entries
    }
}

/// Builds the reference (population) market graph: edge `(i,j)` present iff
/// `p[i][j] > p0`, with strict inequality; ties are non-edges.
pub fn reference_graph(p: &SignProbabilityMatrix, p0: f64) -> Result<AdjacencyMatrix> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::OutOfDomain {
            what: "p0",
            value: p0,
            domain: "[0, 1]",
        });
    }
    let n = p.dim();
    let mut g = AdjacencyMatrix::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if p.get(i, j) > p0 {
                g.set_edge(i, j, true);
            }
        }
    }
    Ok(g)
}

/// Adjacency matrix of a simple undirected graph: symmetric, binary, zero
/// diagonal. One element of the decision space of `2^(N(N-1)/2)` graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    dim: usize,
    cells: Vec<bool>,
}

impl AdjacencyMatrix {
    /// Graph with no edges.
    pub fn empty(dim: usize) -> Self {
        AdjacencyMatrix {
            dim,
            cells: vec![false; dim * dim],
        }
    }

    /// Complete graph.
    pub fn complete(dim: usize) -> Self {
        let mut g = Self::empty(dim);
        for i in 0..dim {
            for j in (i + 1)..dim {
                g.set_edge(i, j, true);
            }
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets both `(i,j)` and `(j,i)`. Panics on a self-loop.
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        assert!(i != j, "adjacency matrices have a zero diagonal");
        self.cells[i * self.dim + j] = present;
        self.cells[j * self.dim + i] = present;
    }

    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.dim + j]
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Iterates present edges as `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim).flat_map(move |i| {
            ((i + 1)..self.dim).filter_map(move |j| self.edge(i, j).then_some((i, j)))
        })
    }

    /// CSV form with 0/1 entries, same shape as the correlation CSV.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if j > 0 {
                    out.push(',');
                }
                out.push(if self.edge(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Edge-list form: one `i,j` pair per line, 0-based, `i < j`.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i},{j}");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_edge_list_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// How observations are centered before sign and correlation statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CenteringMode {
    /// Expectations are known to be zero; observations are used as-is.
    /// This is the default and matches the model the procedures are
    /// optimal under.
    #[default]
    KnownZeroMean,
    /// Subtract each series' sample mean first. A pragmatic deviation for
    /// real data whose means are unknown.
    SampleMean,
}

/// `N` observed series of `n` values each, plus the centering convention
/// under which the identification procedures should read them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    series_count: usize,
    sample_size: usize,
    values: Vec<f64>, // row-major: series i occupies [i*n, (i+1)*n)
    centering: CenteringMode,
}

impl SampleMatrix {
    pub fn from_rows(rows: &[Vec<f64>], centering: CenteringMode) -> Result<Self> {
        let series_count = rows.len();
        if series_count < 2 {
            return Err(Error::TooFew {
                what: "series",
                min: 2,
                got: series_count,
            });
        }
        let sample_size = rows[0].len();
        if sample_size < 2 {
            return Err(Error::TooFew {
                what: "observations",
                min: 2,
                got: sample_size,
            });
        }
        let mut values = Vec::with_capacity(series_count * sample_size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != sample_size {
                return Err(Error::LengthMismatch {
                    left: sample_size,
                    right: row.len(),
                });
            }
            for (t, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j: t, value: v });
                }
                values.push(v);
            }
        }
        Ok(SampleMatrix {
            series_count,
            sample_size,
            values,
            centering,
        })
    }

    pub(crate) fn from_flat(
        series_count: usize,
        sample_size: usize,
        values: Vec<f64>,
        centering: CenteringMode,
    ) -> Self {
        debug_assert_eq!(values.len(), series_count * sample_size);
        SampleMatrix {
            series_count,
            sample_size,
            values,
            centering,
        }
    }

    pub fn series_count(&self) -> usize {
        self.series_count
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn centering(&self) -> CenteringMode {
        self.centering
    }

    /// Observations of series `i`.
    #[inline]
    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i * self.sample_size..(i + 1) * self.sample_size]
    }

    /// The sample with centering applied: a borrowed view when the means are
    /// known zero, an owned mean-subtracted copy otherwise. The result is
    /// always in `KnownZeroMean` mode.
    pub fn centered(&self) -> Cow<'_, SampleMatrix> {
        match self.centering {
            CenteringMode::KnownZeroMean => Cow::Borrowed(self),
            CenteringMode::SampleMean => {
                let n = self.sample_size as f64;
                let mut values = self.values.clone();
                for i in 0..self.series_count {
                    let row = &mut values[i * self.sample_size..(i + 1) * self.sample_size];
                    let mean = row.iter().sum::<f64>() / n;
                    for v in row.iter_mut() {
                        *v -= mean;
                    }
                }
                Cow::Owned(SampleMatrix {
                    series_count: self.series_count,
                    sample_size: self.sample_size,
                    values,
                    centering: CenteringMode::KnownZeroMean,
                })
            }
        }
    }
}
