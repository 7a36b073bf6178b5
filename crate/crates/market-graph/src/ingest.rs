//! Loading return tables from CSV and estimating correlation and
//! sign-probability matrices from observations.
//!
//! The expected layout is one observation per row and one instrument per
//! column, optionally preceded by a ticker header row and optionally carrying
//! a leading label column (dates); both are auto-detected. Rows with missing
//! cells are dropped and counted, never imputed.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{CenteringMode, CorrelationMatrix, SampleMatrix, SignProbabilityMatrix};
use crate::matrix::SquareMatrix;
use crate::{pearson, sign};

/// A loaded table of returns: `N` named series of `n` observations.
#[derive(Debug, Clone)]
pub struct ReturnsTable {
    pub tickers: Vec<String>,
    /// Row labels when the file carried a non-numeric first column.
    pub dates: Option<Vec<String>>,
    /// Observation rows dropped because of missing cells.
    pub dropped_rows: usize,
    values: Vec<Vec<f64>>, // per series
}

impl ReturnsTable {
    pub fn series_count(&self) -> usize {
        self.values.len()
    }

    pub fn sample_size(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Converts to a [`SampleMatrix`] under the given centering convention.
    pub fn to_sample(&self, centering: CenteringMode) -> Result<SampleMatrix> {
        SampleMatrix::from_rows(&self.values, centering)
    }
}

fn is_numeric(cell: &str) -> bool {
    !cell.trim().is_empty() && cell.trim().parse::<f64>().is_ok()
}

/// Loads a returns CSV.
///
/// A first row whose cells are all non-numeric is treated as the ticker
/// header. A non-numeric first column in the data is treated as date labels.
/// Empty cells drop the whole observation row (counted in
/// [`ReturnsTable::dropped_rows`]); any other unparseable cell is an error
/// carrying its 1-based file position.
pub fn load_returns_csv(path: &Path) -> Result<ReturnsTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    if rows.len() < 2 {
        return Err(Error::TooFew {
            what: "rows",
            min: 2,
            got: rows.len(),
        });
    }

    let has_header = rows[0].iter().all(|c| !is_numeric(c));
    let first_data = usize::from(has_header);
    if rows.len() - first_data < 2 {
        return Err(Error::TooFew {
            what: "observation rows",
            min: 2,
            got: rows.len() - first_data,
        });
    }
    let has_dates = !is_numeric(rows[first_data].first().map_or("", |s| s.as_str()));
    let first_col = usize::from(has_dates);
    let width = rows[first_data].len();
    let series_count = width - first_col;
    if series_count < 2 {
        return Err(Error::TooFew {
            what: "series",
            min: 2,
            got: series_count,
        });
    }

    let tickers: Vec<String> = if has_header {
        rows[0][first_col..].iter().map(|s| s.trim().to_string()).collect()
    } else {
        (1..=series_count).map(|i| format!("s{i}")).collect()
    };
    if has_header && tickers.len() != series_count {
        return Err(Error::DimensionMismatch {
            left: tickers.len(),
            right: series_count,
        });
    }

    let mut values: Vec<Vec<f64>> = vec![Vec::new(); series_count];
    let mut dates: Vec<String> = Vec::new();
    let mut dropped = 0usize;
    for (idx, row) in rows.iter().enumerate().skip(first_data) {
        let missing = row.len() < width || row.iter().any(|c| c.trim().is_empty());
        if missing {
            dropped += 1;
            continue;
        }
        // parse the full row first so a bad cell doesn't leave ragged series
        let mut parsed = Vec::with_capacity(series_count);
        for (j, cell) in row[first_col..].iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row: idx + 1,
                col: first_col + j + 1,
                content: cell.trim().to_string(),
            })?;
            parsed.push(v);
        }
        for (j, v) in parsed.into_iter().enumerate() {
            values[j].push(v);
        }
        if has_dates {
            dates.push(row[0].trim().to_string());
        }
    }
    let n = values[0].len();
    if n < 2 {
        return Err(Error::TooFew {
            what: "complete observation rows",
            min: 2,
            got: n,
        });
    }
    Ok(ReturnsTable {
        tickers,
        dates: has_dates.then_some(dates),
        dropped_rows: dropped,
        values,
    })
}

/// Estimates the sample correlation matrix and the empirical
/// sign-probability matrix (`V[i][j] / n`) from a returns table.
///
/// The correlation matrix passes the full validation path; it is a Gram
/// matrix up to rounding, so at most the documented jitter is applied.
pub fn estimate_matrices(
    table: &ReturnsTable,
    centering: CenteringMode,
) -> Result<(CorrelationMatrix, SignProbabilityMatrix)> {
    let sample = table.to_sample(centering)?;
    let data = sample.centered();
    let dim = data.series_count();
    let n = data.sample_size() as f64;

    let r = pearson::correlation_statistics(&data)?;
    let v = sign::sign_statistics(&data);

    let mut corr = SquareMatrix::identity(dim);
    let mut prob = SquareMatrix::filled(dim, 1.0);
    let mut idx = 0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            corr.set(i, j, r[idx]);
            corr.set(j, i, r[idx]);
            let p = v[idx] as f64 / n;
            prob.set(i, j, p);
            prob.set(j, i, p);
            idx += 1;
        }
    }
    Ok((
        CorrelationMatrix::validate(corr)?,
        SignProbabilityMatrix::validate(prob)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("returns.csv");
        std::fs::write(&path, content).unwrap();
        (dir, path)
    }

    #[test]
    fn plain_numeric_table() {
        let (_d, path) = write_tmp("0.1,0.2\n-0.3,0.4\n0.5,-0.6\n");
        let t = load_returns_csv(&path).unwrap();
        assert_eq!(t.series_count(), 2);
        assert_eq!(t.sample_size(), 3);
        assert_eq!(t.tickers, vec!["s1", "s2"]);
        assert!(t.dates.is_none());
        assert_eq!(t.series(0), &[0.1, -0.3, 0.5]);
    }

    #[test]
    fn header_row_detected() {
        let (_d, path) = write_tmp("AAA,BBB\n1,2\n3,4\n5,6\n");
        let t = load_returns_csv(&path).unwrap();
        assert_eq!(t.tickers, vec!["AAA", "BBB"]);
        assert_eq!(t.series_count(), 2);
        assert_eq!(t.sample_size(), 3);
    }

    #[test]
    fn date_column_detected() {
        let (_d, path) = write_tmp("date,AAA,BBB\n2013-01-02,0.1,0.2\n2013-01-03,0.3,0.4\n");
        let t = load_returns_csv(&path).unwrap();
        assert_eq!(t.tickers, vec!["AAA", "BBB"]);
        assert_eq!(
            t.dates.as_deref(),
            Some(&["2013-01-02".to_string(), "2013-01-03".to_string()][..])
        );
        assert_eq!(t.series(1), &[0.2, 0.4]);
    }

    #[test]
    fn bad_cell_is_a_positioned_error() {
        let (_d, path) = write_tmp("1,2\nxyz,4\n5,6\n");
        match load_returns_csv(&path) {
            Err(Error::Parse { row: 2, col: 1, content }) => assert_eq!(content, "xyz"),
            other => panic!("expected positioned parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_cells_drop_rows_and_count() {
        let (_d, path) = write_tmp("1,2\n3,\n5,6\n7,8\n");
        let t = load_returns_csv(&path).unwrap();
        assert_eq!(t.dropped_rows, 1);
        assert_eq!(t.sample_size(), 3);
        assert_eq!(t.series(0), &[1.0, 5.0, 7.0]);
    }

    #[test]
    fn estimates_on_identical_and_opposite_series() {
        let (_d, path) = write_tmp("1,1,-1\n-2,-2,2\n3,3,-3\n-1,-1,1\n");
        let t = load_returns_csv(&path).unwrap();
        let (corr, prob) = estimate_matrices(&t, CenteringMode::KnownZeroMean).unwrap();
        assert_eq!(corr.get(0, 1), 1.0);
        assert_eq!(prob.get(0, 1), 1.0);
        assert_eq!(corr.get(0, 2), -1.0);
        assert_eq!(prob.get(0, 2), 0.0);
    }

    #[test]
    fn sign_probability_is_exactly_v_over_n() {
        // n = 8 and v = 3: the estimate must be exactly 0.375
        let rows = "1,1\n1,-1\n1,-1\n-1,1\n1,1\n-1,-1\n1,-1\n-1,1\n";
        let (_d, path) = write_tmp(rows);
        let t = load_returns_csv(&path).unwrap();
        let (_, prob) = estimate_matrices(&t, CenteringMode::KnownZeroMean).unwrap();
        assert_eq!(prob.get(0, 1), 0.375);
    }

    #[test]
    fn constant_series_is_degenerate_under_sample_mean_centering() {
        let (_d, path) = write_tmp("1,5\n2,5\n3,5\n");
        let t = load_returns_csv(&path).unwrap();
        match estimate_matrices(&t, CenteringMode::SampleMean) {
            Err(Error::DegenerateSeries { index: 1 }) => {}
            other => panic!("expected degenerate series 1, got {other:?}"),
        }
    }

    #[test]
    fn estimator_converges_with_sample_size() {
        use crate::graph::sign_prob_from_correlation;
        use crate::sampling::{sample, DistributionSpec};
        let rho = 0.5;
        let sigma = crate::graph::CorrelationMatrix::equicorrelated(2, rho).unwrap();
        let target = sign_prob_from_correlation(rho).unwrap();
        let mut errs = Vec::new();
        for (seed, n) in [(1u64, 1_000usize), (2, 10_000), (3, 100_000)] {
            let x = sample(&DistributionSpec::gaussian(sigma.clone(), seed), n).unwrap();
            let table = ReturnsTable {
                tickers: vec!["a".into(), "b".into()],
                dates: None,
                dropped_rows: 0,
                values: vec![x.series(0).to_vec(), x.series(1).to_vec()],
            };
            let (corr, prob) = estimate_matrices(&table, CenteringMode::KnownZeroMean).unwrap();
            errs.push(((corr.get(0, 1) - rho).abs(), (prob.get(0, 1) - target).abs()));
        }
        // errors shrink with n and end below 0.01
        assert!(errs[2].0 < errs[0].0 && errs[2].1 < errs[0].1, "{errs:?}");
        assert!(errs[2].0 < 0.01 && errs[2].1 < 0.01, "{errs:?}");
    }
}
