//! Point clouds, moment summaries and CSV ingestion.
//!
//! A [`SampleSet`] is an immutable N x d matrix of finite reals: one row per
//! sample, one column per coordinate. The CSV loader accepts plain
//! comma-separated reals with an optional header row.

use std::fs::File;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    data: Array2<f64>,
}

impl SampleSet {
    /// Validates shape (at least one row and one column) and finiteness.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if data.ncols() == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        for ((j, i), &v) in data.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("sample {j}, coordinate {i}: {v}")));
            }
        }
        Ok(Self { data })
    }

    /// Builds from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        let d = rows[0].len();
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: r.len() });
            }
        }
        let mut flat = Vec::with_capacity(rows.len() * d);
        for r in rows {
            flat.extend_from_slice(r);
        }
        let data = Array2::from_shape_vec((rows.len(), d), flat)
            .expect("row-major flattening matches the declared shape");
        Self::new(data)
    }

    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn moment_summary(&self) -> MomentSummary {
        matrix_moments(self.data.view())
    }
}

/// First and second moments of a point cloud.
///
/// `second_moment` is the mean squared norm of the rows;
/// `centered_second_moment` subtracts the squared norm of the mean and is
/// clamped at zero so floating-point cancellation can never leave a negative
/// variance.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSummary {
    pub mean: Array1<f64>,
    pub second_moment: f64,
    pub centered_second_moment: f64,
}

/// Turns per-column sums and the raw squared-norm sum into a summary.
///
/// Shared by the in-memory path and the streaming feature path so the two
/// agree bit for bit when fed identical values.
pub(crate) fn summarize_sums(col_sums: &[f64], raw_sum: f64, n: usize) -> MomentSummary {
    let nf = n as f64;
    let second_moment = raw_sum / nf;
    let mean = Array1::from_iter(col_sums.iter().map(|s| s / nf));
    let mean_sq: f64 = mean.iter().map(|m| m * m).sum();
    let centered_second_moment = (second_moment - mean_sq).max(0.0);
    MomentSummary { mean, second_moment, centered_second_moment }
}

/// Single pass over the rows: per-column sums plus the total squared norm.
pub(crate) fn matrix_moments(data: ArrayView2<'_, f64>) -> MomentSummary {
    let mut col_sums = vec![0.0f64; data.ncols()];
    let mut raw_sum = 0.0f64;
    for row in data.rows() {
        let mut norm_sq = 0.0;
        for (i, &v) in row.iter().enumerate() {
            norm_sq += v * v;
            col_sums[i] += v;
        }
        raw_sum += norm_sq;
    }
    summarize_sums(&col_sums, raw_sum, data.nrows())
}

/// How to treat the first CSV row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HeaderMode {
    /// Skip the first row only when none of its fields parse as a number.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CsvOptions {
    pub header: HeaderMode,
}

/// Loads a sample set from a CSV file of reals.
///
/// Rows become samples, columns become coordinates. Ragged rows, unparsable
/// fields and non-finite values are reported with 1-based row and column
/// positions.
pub fn load_sample_set<P: AsRef<Path>>(path: P, options: &CsvOptions) -> Result<SampleSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (ridx, record) in reader.records().enumerate() {
        let row_no = ridx + 1;
        let record = record.map_err(|e| Error::Parse {
            row: row_no,
            col: 1,
            reason: e.to_string(),
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue; // blank line
        }
        if ridx == 0 {
            let skip = match options.header {
                HeaderMode::Always => true,
                HeaderMode::Never => false,
                HeaderMode::Auto => record.iter().all(|f| f.parse::<f64>().is_err()),
            };
            if skip {
                continue;
            }
        }
        let mut vals = Vec::with_capacity(record.len());
        for (cidx, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row: row_no,
                col: cidx + 1,
                reason: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: row_no,
                    col: cidx + 1,
                    reason: format!("non-finite value: {field:?}"),
                });
            }
            vals.push(v);
        }
        if let Some(w) = width {
            if vals.len() != w {
                return Err(Error::Parse {
                    row: row_no,
                    col: vals.len().min(w) + 1,
                    reason: format!("expected {w} fields, got {}", vals.len()),
                });
            }
        } else {
            width = Some(vals.len());
        }
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(Error::Parse { row: 1, col: 1, reason: "no data rows".into() });
    }
    SampleSet::from_rows(&rows)
}
