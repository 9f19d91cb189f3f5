//! CSV ingestion, min-max normalization, label encoding, and seeded splits.

use rand::seq::SliceRandom;
use serde::Serialize;
use std::cmp::Ordering;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, SPLIT_STREAM, TRIAL_STREAM_BASE};
use crate::Real;

/// Which CSV column carries the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// The last column (the default for all bundled fixtures).
    Last,
    /// The column with this header name (requires a header row).
    Name(String),
}

/// A parsed CSV: numeric feature rows with string labels still attached.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<RawRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub features: Vec<f64>,
    pub label: String,
}

/// Normalized samples ready for the feature transform.
///
/// `x` lives in [0,1] per column; `y` holds contiguous ids assigned by
/// sorting the distinct class names (numerically when every name parses as a
/// number, lexicographically otherwise). `normalization_params` records the
/// per-column (min, max) so new raw rows can be scaled identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset<F> {
    pub x: Vec<Vec<F>>,
    pub y: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub normalization_params: Vec<(F, F)>,
}

impl<F: Real> Dataset<F> {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Samples per class, indexed by class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes()];
        for &label in &self.y {
            counts[label] += 1;
        }
        counts
    }

    /// Scales a raw feature row with this dataset's stored parameters.
    /// Values outside the recorded range are clamped into [0,1].
    pub fn apply_normalization(&self, raw: &[f64]) -> Result<Vec<F>> {
        if raw.len() != self.num_features() {
            return Err(Error::DimensionMismatch(format!(
                "row has {} features, dataset has {}",
                raw.len(),
                self.num_features()
            )));
        }
        Ok(raw
            .iter()
            .zip(&self.normalization_params)
            .map(|(v, (min, max))| scale_cell(F::from_f64(*v).unwrap(), *min, *max))
            .collect())
    }

    /// Maps a normalized row back to raw units (inverse of the scaling).
    pub fn denormalize_row(&self, row: &[F]) -> Vec<f64> {
        row.iter()
            .zip(&self.normalization_params)
            .map(|(v, (min, max))| (*v * (*max - *min) + *min).to_f64().unwrap())
            .collect()
    }
}

fn scale_cell<F: Real>(v: F, min: F, max: F) -> F {
    if max == min {
        return F::zero();
    }
    let scaled = (v - min) / (max - min);
    scaled.max(F::zero()).min(F::one())
}

/// Orders class names numerically when both parse as numbers, otherwise
/// lexicographically; gives stable, predictable label ids.
fn class_name_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x
            .partial_cmp(&y)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}

/// Loads a CSV of numeric features plus one label column.
///
/// Error rows are reported with their 1-based file row number (the header,
/// when present, is row 1). Missing or non-numeric feature cells are parse
/// errors: the supported datasets are complete, so absent values indicate a
/// malformed file.
pub fn load_csv(path: &Path, label_column: &LabelColumn, has_header: bool) -> Result<RawTable> {
    let content = std::fs::read_to_string(path)?;
    if content.trim().is_empty() {
        return Err(Error::Parse {
            row: 1,
            message: format!("{} is empty", path.display()),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(content.as_bytes());

    let headers: Option<Vec<String>> = if has_header {
        Some(
            reader
                .headers()
                .map_err(|e| Error::Parse {
                    row: 1,
                    message: e.to_string(),
                })?
                .iter()
                .map(str::to_owned)
                .collect(),
        )
    } else {
        None
    };

    let label_index_for = |width: usize| -> Result<usize> {
        match label_column {
            LabelColumn::Last => Ok(width - 1),
            LabelColumn::Name(name) => {
                let headers = headers.as_ref().ok_or_else(|| {
                    Error::Label(format!(
                        "label column `{name}` requested but the file has no header"
                    ))
                })?;
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::Label(format!("no column named `{name}`")))
            }
        }
    };

    let header_offset = usize::from(has_header);
    let mut rows = Vec::new();
    let mut label_index = None;
    for (i, record) in reader.records().enumerate() {
        let row_number = i + 1 + header_offset;
        let record = record.map_err(|e| Error::Parse {
            row: row_number,
            message: e.to_string(),
        })?;
        if record.len() < 2 {
            return Err(Error::Parse {
                row: row_number,
                message: format!(
                    "{} columns; need at least one feature and a label",
                    record.len()
                ),
            });
        }
        let li = match label_index {
            Some(li) => li,
            None => {
                let li = label_index_for(record.len())?;
                label_index = Some(li);
                li
            }
        };
        let mut features = Vec::with_capacity(record.len() - 1);
        let mut label = String::new();
        for (col, cell) in record.iter().enumerate() {
            if col == li {
                label = cell.to_owned();
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                row: row_number,
                message: format!("column {}: `{cell}` is not numeric", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row: row_number,
                    message: format!("column {}: `{cell}` is not finite", col + 1),
                });
            }
            features.push(value);
        }
        if label.is_empty() {
            return Err(Error::Parse {
                row: row_number,
                message: "empty label cell".into(),
            });
        }
        rows.push(RawRow { features, label });
    }

    let feature_names = match (&headers, rows.first()) {
        (Some(headers), _) => {
            let li = match label_index {
                Some(li) => li,
                None => label_index_for(headers.len())?,
            };
            headers
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != li)
                .map(|(_, h)| h.clone())
                .collect()
        }
        (None, Some(first)) => (0..first.features.len()).map(|j| format!("x{j}")).collect(),
        (None, None) => Vec::new(),
    };
    Ok(RawTable {
        feature_names,
        rows,
    })
}

/// Min-max scales every column into [0,1] and encodes labels.
///
/// Constant columns map to all zeros. Labels are encoded by the sorted order
/// of the distinct class names (see [`Dataset`]).
pub fn normalize<F: Real>(raw: &RawTable) -> Result<Dataset<F>> {
    if raw.rows.is_empty() {
        return Err(Error::DimensionMismatch(
            "cannot normalize a table with no data rows".into(),
        ));
    }
    let n = raw.rows[0].features.len();
    for (i, row) in raw.rows.iter().enumerate() {
        if row.features.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} features, expected {n}",
                i + 1,
                row.features.len()
            )));
        }
    }

    let mut class_names: Vec<String> = raw.rows.iter().map(|r| r.label.clone()).collect();
    class_names.sort_by(|a, b| class_name_order(a, b));
    class_names.dedup();
    let class_id = |name: &str| -> usize { class_names.iter().position(|c| c == name).unwrap() };

    let mut params = Vec::with_capacity(n);
    for j in 0..n {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for row in &raw.rows {
            min = min.min(row.features[j]);
            max = max.max(row.features[j]);
        }
        params.push((F::from_f64(min).unwrap(), F::from_f64(max).unwrap()));
    }

    let x = raw
        .rows
        .iter()
        .map(|row| {
            row.features
                .iter()
                .zip(&params)
                .map(|(v, (min, max))| scale_cell(F::from_f64(*v).unwrap(), *min, *max))
                .collect()
        })
        .collect();
    let y = raw.rows.iter().map(|r| class_id(&r.label)).collect();

    Ok(Dataset {
        x,
        y,
        feature_names: raw.feature_names.clone(),
        class_names,
        normalization_params: params,
    })
}

/// A train/test partition carrying the original row indices for provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Split<F> {
    pub train: Dataset<F>,
    pub test: Dataset<F>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

fn subset<F: Real>(ds: &Dataset<F>, indices: &[usize]) -> Dataset<F> {
    Dataset {
        x: indices.iter().map(|&i| ds.x[i].clone()).collect(),
        y: indices.iter().map(|&i| ds.y[i]).collect(),
        feature_names: ds.feature_names.clone(),
        class_names: ds.class_names.clone(),
        normalization_params: ds.normalization_params.clone(),
    }
}

fn per_class_indices<F: Real>(ds: &Dataset<F>) -> Vec<Vec<usize>> {
    let mut by_class = vec![Vec::new(); ds.num_classes()];
    for (i, &label) in ds.y.iter().enumerate() {
        by_class[label].push(i);
    }
    by_class
}

/// Splits by per-class seeded shuffle: the first `train_counts[c]` shuffled
/// rows of each class go to train, the remainder to test. Index lists come
/// back sorted ascending.
pub fn split<F: Real>(ds: &Dataset<F>, train_counts: &[usize], seed: u64) -> Result<Split<F>> {
    let class_counts = ds.class_counts();
    if train_counts.len() != class_counts.len() {
        return Err(Error::InfeasibleSplit(format!(
            "{} train counts for {} classes",
            train_counts.len(),
            class_counts.len()
        )));
    }
    for (c, (&want, &have)) in train_counts.iter().zip(&class_counts).enumerate() {
        if want > have {
            return Err(Error::InfeasibleSplit(format!(
                "class {c} ({}) has {have} samples, cannot take {want} for training",
                ds.class_names[c]
            )));
        }
    }
    let mut rng = stream_rng(seed, SPLIT_STREAM);
    let mut train_indices = Vec::new();
    let mut test_indices = Vec::new();
    for (class, indices) in per_class_indices(ds).iter().enumerate() {
        let mut shuffled = indices.clone();
        shuffled.shuffle(&mut rng);
        let (tr, te) = shuffled.split_at(train_counts[class]);
        train_indices.extend_from_slice(tr);
        test_indices.extend_from_slice(te);
    }
    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok(Split {
        train: subset(ds, &train_indices),
        test: subset(ds, &test_indices),
        train_indices,
        test_indices,
    })
}

/// Leakage-free alternative to global normalization: splits the *raw* table,
/// fits min-max parameters on the training rows only, and scales both sides
/// with them (test cells outside the training range clamp into [0,1]).
pub fn split_train_normalized<F: Real>(
    raw: &RawTable,
    train_counts: &[usize],
    seed: u64,
) -> Result<Split<F>> {
    // Encode labels and slice rows on a globally normalized view first; only
    // the scaling parameters differ in this mode.
    let global: Dataset<F> = normalize(raw)?;
    let base = split(&global, train_counts, seed)?;

    let mut params = Vec::with_capacity(global.num_features());
    for j in 0..global.num_features() {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &i in &base.train_indices {
            min = min.min(raw.rows[i].features[j]);
            max = max.max(raw.rows[i].features[j]);
        }
        params.push((F::from_f64(min).unwrap(), F::from_f64(max).unwrap()));
    }
    let rescale = |indices: &[usize]| -> Dataset<F> {
        Dataset {
            x: indices
                .iter()
                .map(|&i| {
                    raw.rows[i]
                        .features
                        .iter()
                        .zip(&params)
                        .map(|(v, (min, max))| scale_cell(F::from_f64(*v).unwrap(), *min, *max))
                        .collect()
                })
                .collect(),
            y: indices.iter().map(|&i| global.y[i]).collect(),
            feature_names: global.feature_names.clone(),
            class_names: global.class_names.clone(),
            normalization_params: params.clone(),
        }
    };
    Ok(Split {
        train: rescale(&base.train_indices),
        test: rescale(&base.test_indices),
        train_indices: base.train_indices,
        test_indices: base.test_indices,
    })
}

/// Seeded low-training-regime splits: for each trial, `per_class` samples of
/// every class train and the remainder tests. Each trial draws from its own
/// stream, so trials are independent yet reproducible.
pub fn lowsample_splits<F: Real>(
    ds: &Dataset<F>,
    per_class: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<Split<F>>> {
    if per_class == 0 {
        return Err(Error::InfeasibleSplit("per_class must be >= 1".into()));
    }
    if trials == 0 {
        return Err(Error::InfeasibleSplit("trials must be >= 1".into()));
    }
    let smallest = ds
        .class_counts()
        .into_iter()
        .min()
        .ok_or_else(|| Error::Label("dataset has no classes".into()))?;
    if per_class > smallest.saturating_sub(1) {
        return Err(Error::InfeasibleSplit(format!(
            "per_class {per_class} needs every class to keep a test sample; smallest class has {smallest}"
        )));
    }
    let by_class = per_class_indices(ds);
    let mut splits = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = stream_rng(seed, TRIAL_STREAM_BASE + trial as u64);
        let mut train_indices = Vec::new();
        let mut test_indices = Vec::new();
        for indices in &by_class {
            let mut shuffled = indices.clone();
            shuffled.shuffle(&mut rng);
            let (tr, te) = shuffled.split_at(per_class);
            train_indices.extend_from_slice(tr);
            test_indices.extend_from_slice(te);
        }
        train_indices.sort_unstable();
        test_indices.sort_unstable();
        splits.push(Split {
            train: subset(ds, &train_indices),
            test: subset(ds, &test_indices),
            train_indices,
            test_indices,
        });
    }
    Ok(splits)
}
