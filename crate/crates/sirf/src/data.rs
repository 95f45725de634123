//! Dataset container, CSV ingestion, train/test splitting, and bootstrap
//! resampling.

use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// An immutable n x p feature matrix with binary responses.
///
/// Features are stored feature-major (each column contiguous), which is the
/// natural layout for split finding. Responses are 0/1; both classes need not
/// be present (fitting operations reject single-class data themselves).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    responses: Vec<u8>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Build from feature columns. Validates finiteness, shape, label range,
    /// and feature-name uniqueness.
    pub fn from_columns(
        columns: Vec<Vec<f64>>,
        responses: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidDataset("p must be >= 1".into()));
        }
        if columns.len() != feature_names.len() {
            return Err(Error::InvalidDataset(format!(
                "{} columns but {} feature names",
                columns.len(),
                feature_names.len()
            )));
        }
        let n = responses.len();
        if n < 2 {
            return Err(Error::InvalidDataset("n must be >= 2".into()));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "column {} has {} rows, expected {}",
                    feature_names[j],
                    col.len(),
                    n
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCell {
                    row: i + 1,
                    column: feature_names[j].clone(),
                });
            }
        }
        if responses.iter().any(|&y| y > 1) {
            return Err(Error::InvalidDataset("responses must be 0 or 1".into()));
        }
        for (j, name) in feature_names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidDataset(format!("feature {j} has empty name")));
            }
            if feature_names[..j].contains(name) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate feature name '{name}'"
                )));
            }
        }
        Ok(Dataset {
            columns,
            responses,
            feature_names,
        })
    }

    /// Build from row-major feature data.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        responses: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let p = feature_names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for row in &rows {
            if row.len() != p {
                return Err(Error::InvalidDataset(format!(
                    "row has {} values, expected {}",
                    row.len(),
                    p
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                columns[j].push(v);
            }
        }
        Self::from_columns(columns, responses, feature_names)
    }

    pub fn n_rows(&self) -> usize {
        self.responses.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature][row]
    }

    pub fn column(&self, feature: usize) -> &[f64] {
        &self.columns[feature]
    }

    pub fn response(&self, row: usize) -> u8 {
        self.responses[row]
    }

    pub fn responses(&self) -> &[u8] {
        &self.responses
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// One full row as a point (allocates).
    pub fn row(&self, row: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    /// True when both response classes occur.
    pub fn has_both_classes(&self) -> bool {
        let first = self.responses[0];
        self.responses.iter().any(|&y| y != first)
    }

    /// New dataset holding the given rows (duplicates allowed), in order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&i| col[i]).collect())
            .collect();
        let responses = rows.iter().map(|&i| self.responses[i]).collect();
        Dataset::from_columns(columns, responses, self.feature_names.clone())
    }

    /// Write as CSV with a trailing response column.
    ///
    /// Floats are written in shortest round-trip form, so a write/load cycle
    /// reproduces the matrix bit-exactly.
    pub fn write_csv(&self, path: &Path, response_column: &str) -> Result<()> {
        let mut out = String::new();
        for name in &self.feature_names {
            out.push_str(&csv_field(name));
            out.push(',');
        }
        out.push_str(&csv_field(response_column));
        out.push('\n');
        for i in 0..self.n_rows() {
            for col in &self.columns {
                out.push_str(&format!("{}", col[i]));
                out.push(',');
            }
            out.push_str(&format!("{}\n", self.responses[i]));
        }
        write_text(path, &out)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Empirical quantile by linear interpolation between order statistics
/// (R type 7). `sorted` must be ascending and nonempty.
pub(crate) fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let n = sorted.len();
    let h = (n as f64 - 1.0) * level;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    f.write_all(text.as_bytes()).map_err(io_err)
}

/// CSV ingestion options.
#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Accept `true`/`false` response tokens (mapped to 1/0) in addition to `0`/`1`.
    pub bool_tokens: bool,
}

/// Load a CSV file with a header row; `response_column` is removed from the
/// features and parsed as the binary response.
///
/// Error coordinates use 1-based data-row indices (the header is row 0).
pub fn load_csv(path: &Path, response_column: &str) -> Result<Dataset> {
    load_csv_with(path, response_column, CsvOptions::default())
}

pub fn load_csv_with(path: &Path, response_column: &str, opts: CsvOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::MissingColumn(response_column.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != response_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); feature_names.len()];
    let mut responses = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let mut k = 0;
        for (j, cell) in record.iter().enumerate() {
            if j == response_idx {
                let y = match cell.trim() {
                    "0" => 0,
                    "1" => 1,
                    "true" | "TRUE" | "True" if opts.bool_tokens => 1,
                    "false" | "FALSE" | "False" if opts.bool_tokens => 0,
                    other => {
                        return Err(Error::NonBinaryResponse {
                            row,
                            column: response_column.to_string(),
                            value: other.to_string(),
                        })
                    }
                };
                responses.push(y);
            } else {
                let column = headers.get(j).cloned().unwrap_or_else(|| format!("col{j}"));
                if k >= columns.len() {
                    return Err(Error::InvalidDataset(format!("row {row} has extra cells")));
                }
                let v: f64 = cell.trim().parse().map_err(|_| Error::NonNumericCell {
                    row,
                    column: column.clone(),
                    value: cell.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteCell { row, column });
                }
                columns[k].push(v);
                k += 1;
            }
        }
        if k != columns.len() {
            return Err(Error::InvalidDataset(format!(
                "row {row} has missing cells"
            )));
        }
    }
    Dataset::from_columns(columns, responses, feature_names)
}

/// Deterministic train/test partition spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Fraction of rows assigned to the test partition, in (0, 1).
    pub test_fraction: f64,
    pub seed: u64,
}

/// Split into disjoint train/test parts; `|test| = round(n * test_fraction)`.
///
/// Both partitions must hold at least two rows (the dataset invariant), so
/// fractions cutting off a single row are rejected as degenerate. Row order
/// within each part follows the original dataset, so equal
/// `(Dataset, SplitSpec)` pairs produce identical partitions.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let n = data.n_rows();
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::DegenerateSplit(spec.test_fraction));
    }
    let exact = n as f64 * spec.test_fraction;
    if exact.floor() < 1.0 {
        return Err(Error::DegenerateSplit(spec.test_fraction));
    }
    let test_size = exact.round() as usize;
    if test_size < 2 || n - test_size < 2 {
        return Err(Error::DegenerateSplit(spec.test_fraction));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(spec.seed, 0);
    order.shuffle(&mut rng);
    let mut test_rows: Vec<usize> = order[..test_size].to_vec();
    let mut train_rows: Vec<usize> = order[test_size..].to_vec();
    test_rows.sort_unstable();
    train_rows.sort_unstable();
    Ok((
        data.select_rows(&train_rows)?,
        data.select_rows(&test_rows)?,
    ))
}

/// A bootstrap resample: `indices` drawn with replacement, `oob_indices` the
/// sorted complement.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BootstrapSample {
    pub indices: Vec<usize>,
    pub oob_indices: Vec<usize>,
}

/// Draw n rows with replacement; expected out-of-bag fraction is ~ e^-1.
pub fn bootstrap(data: &Dataset, seed: u64) -> Result<BootstrapSample> {
    bootstrap_n(data.n_rows(), seed)
}

pub(crate) fn bootstrap_n(n: usize, seed: u64) -> Result<BootstrapSample> {
    if n < 2 {
        return Err(Error::InvalidDataset("bootstrap needs n >= 2".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut seen = vec![false; n];
    let indices: Vec<usize> = (0..n)
        .map(|_| {
            let i = rng.random_range(0..n);
            seen[i] = true;
            i
        })
        .collect();
    let oob_indices = (0..n).filter(|&i| !seen[i]).collect();
    Ok(BootstrapSample {
        indices,
        oob_indices,
    })
}
