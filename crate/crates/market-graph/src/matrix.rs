//! Dense square matrices and the plain-CSV format shared by all matrix kinds.
//!
//! The on-disk format is N rows of N comma-separated decimal values with no
//! header; it is what `identify` and `validate-sigma` read and write.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A dense row-major square matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    /// Builds a matrix filled with `value`.
    pub fn filled(dim: usize, value: f64) -> Self {
        SquareMatrix {
            dim,
            data: vec![value; dim * dim],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::filled(dim, 0.0);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from nested rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    row: i,
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }

    /// Row-major view of all entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Renders the CSV form: one row per line, full `f64` round-trip precision.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if j > 0 {
                    out.push(',');
                }
                // {} on f64 is the shortest representation that round-trips
                let _ = write!(out, "{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    /// Parses the plain CSV form, reporting 1-based positions on bad cells.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rows = Vec::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for (j, cell) in line.split(',').enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                    row: i + 1,
                    col: j + 1,
                    content: cell.trim().to_string(),
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        if rows.len() < 2 {
            return Err(Error::TooFew {
                what: "matrix rows",
                min: 2,
                got: rows.len(),
            });
        }
        Self::from_rows(&rows)
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
///
/// `jitter_applied` records whether the factorization only succeeded after
/// adding `JITTER` to the diagonal, which happens for correlation matrices
/// estimated from data that are PSD only up to rounding.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
    pub jitter_applied: bool,
}

/// Diagonal jitter used for the single Cholesky retry.
pub const JITTER: f64 = 1e-10;

impl CholeskyFactor {
    /// Factors a symmetric matrix, retrying once with `JITTER` on the diagonal.
    pub fn new(m: &SquareMatrix) -> Result<Self> {
        if let Some(lower) = cholesky_lower(m, 0.0) {
            return Ok(CholeskyFactor {
                dim: m.dim(),
                lower,
                jitter_applied: false,
            });
        }
        match cholesky_lower(m, JITTER) {
            Some(lower) => Ok(CholeskyFactor {
                dim: m.dim(),
                lower,
                jitter_applied: true,
            }),
            None => Err(Error::NotPositiveSemidefinite { jitter: JITTER }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    /// Computes `y = L x` in place of `out`.
    pub fn multiply(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += self.get(i, j) * x[j];
            }
            out[i] = acc;
        }
    }
}

fn cholesky_lower(m: &SquareMatrix, jitter: f64) -> Option<Vec<f64>> {
    let n = m.dim();
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m.get(i, j);
            if i == j {
                sum += jitter;
            }
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 0.25], vec![0.25, 1.0]]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        m.write_csv(&path).unwrap();
        let back = SquareMatrix::read_csv(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn csv_reports_bad_cell_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1.0,0.5\nx,1.0\n").unwrap();
        match SquareMatrix::read_csv(&path) {
            Err(Error::Parse { row: 2, col: 1, .. }) => {}
            other => panic!("expected positioned parse error, got {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { row: 1, .. }));
    }

    #[test]
    fn cholesky_of_identity_is_identity() {
        let m = SquareMatrix::identity(4);
        let f = CholeskyFactor::new(&m).unwrap();
        assert!(!f.jitter_applied);
        for i in 0..4 {
            for j in 0..=i {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(f.get(i, j), want);
            }
        }
    }

    #[test]
    fn cholesky_reconstructs_spd_matrix() {
        let m = SquareMatrix::from_rows(&[
            vec![1.0, 0.5, 0.2],
            vec![0.5, 1.0, 0.3],
            vec![0.2, 0.3, 1.0],
        ])
        .unwrap();
        let f = CholeskyFactor::new(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += f.get(i, k) * f.get(j, k);
                }
                assert!((acc - m.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_needs_jitter() {
        // Equicorrelated with rho = -1/(n-1) has a zero eigenvalue; the plain
        // factorization fails and the jitter retry succeeds.
        let n = 4;
        let rho = -1.0 / (n as f64 - 1.0);
        let mut m = SquareMatrix::filled(n, rho);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        let f = CholeskyFactor::new(&m).unwrap();
        assert!(f.jitter_applied);
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let m = SquareMatrix::from_rows(&[
            vec![1.0, 0.9, 0.9],
            vec![0.9, 1.0, -0.9],
            vec![0.9, -0.9, 1.0],
        ])
        .unwrap();
        assert!(matches!(
            CholeskyFactor::new(&m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }
}
