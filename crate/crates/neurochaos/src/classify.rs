//! Classifiers over extracted features: cosine mean-representation
//! (the native neurochaos decision rule), k-nearest-neighbours, and Gaussian
//! naive Bayes.
//!
//! All tie-breaking is deterministic and documented: the lowest class index
//! wins (cosine argmax, kNN votes, GNB posteriors); kNN distance ties prefer
//! the lower training-row index.

use serde::Serialize;

use crate::chaosfex::FeatureMatrix;
use crate::error::{Error, Result};
use crate::metrics::contiguous_class_counts;
use crate::Real;

/// Per-class mean representation vectors for the cosine decision rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassModel<F> {
    /// Class ids, always `0..K`.
    #[serde(rename = "labels")]
    pub class_labels: Vec<usize>,
    /// Arithmetic mean of each class's training feature rows.
    pub mean_vectors: Vec<Vec<F>>,
}

/// Computes one mean representation vector per class.
pub fn fit_cosine<F: Real>(features: &FeatureMatrix<F>, labels: &[usize]) -> Result<ClassModel<F>> {
    if features.rows() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows vs {} labels",
            features.rows(),
            labels.len()
        )));
    }
    let counts = contiguous_class_counts(labels)?;
    let k = counts.len();
    let dim = features.cols();
    let mut sums = vec![vec![F::zero(); dim]; k];
    for (row, &label) in features.iter_rows().zip(labels) {
        let sum = &mut sums[label];
        for (s, v) in sum.iter_mut().zip(row) {
            *s = *s + *v;
        }
    }
    let mean_vectors = sums
        .into_iter()
        .zip(&counts)
        .map(|(sum, &count)| {
            let denom = F::from_usize(count).unwrap();
            sum.into_iter().map(|s| s / denom).collect()
        })
        .collect();
    Ok(ClassModel {
        class_labels: (0..k).collect(),
        mean_vectors,
    })
}

/// Cosine similarity, with either zero vector mapping to similarity 0.
fn cosine_similarity<F: Real>(a: &[F], b: &[F]) -> F {
    let mut dot = F::zero();
    let mut na = F::zero();
    let mut nb = F::zero();
    for (x, y) in a.iter().zip(b) {
        dot = dot + *x * *y;
        na = na + *x * *x;
        nb = nb + *y * *y;
    }
    if na == F::zero() || nb == F::zero() {
        F::zero()
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Predicts the class whose mean vector has the highest cosine similarity
/// with the query; ties (including all-zero queries) go to the lowest index.
pub fn predict_cosine<F: Real>(model: &ClassModel<F>, feature_row: &[F]) -> Result<usize> {
    let dim = model.mean_vectors.first().map_or(0, Vec::len);
    if feature_row.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "query has {} features, model expects {dim}",
            feature_row.len()
        )));
    }
    let mut best = 0usize;
    let mut best_sim = F::neg_infinity();
    for (c, mean) in model.mean_vectors.iter().enumerate() {
        let sim = cosine_similarity(feature_row, mean);
        if sim > best_sim {
            best_sim = sim;
            best = c;
        }
    }
    Ok(best)
}

/// [`predict_cosine`] for every row of a matrix.
pub fn predict_cosine_batch<F: Real>(
    model: &ClassModel<F>,
    features: &FeatureMatrix<F>,
) -> Result<Vec<usize>> {
    features
        .iter_rows()
        .map(|row| predict_cosine(model, row))
        .collect()
}

/// k-nearest-neighbours over stored training rows (Euclidean distance).
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel<F> {
    train: FeatureMatrix<F>,
    labels: Vec<usize>,
    num_classes: usize,
    k: usize,
}

impl<F: Real> KnnModel<F> {
    pub fn fit(train: FeatureMatrix<F>, labels: Vec<usize>, k: usize) -> Result<Self> {
        if train.rows() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows vs {} labels",
                train.rows(),
                labels.len()
            )));
        }
        if k == 0 || k > train.rows() {
            return Err(Error::param(
                "k",
                format!("{k} not in 1..={} (training rows)", train.rows()),
            ));
        }
        let num_classes = contiguous_class_counts(&labels)?.len();
        Ok(KnnModel {
            train,
            labels,
            num_classes,
            k,
        })
    }

    /// Majority vote among the k nearest training rows. Distance ties are
    /// broken by the lower training-row index, vote ties by the lower label.
    pub fn predict(&self, row: &[F]) -> Result<usize> {
        if row.len() != self.train.cols() {
            return Err(Error::DimensionMismatch(format!(
                "query has {} features, model expects {}",
                row.len(),
                self.train.cols()
            )));
        }
        // Squared distances order identically to Euclidean ones, including
        // ties, and skip the sqrt.
        let mut dists: Vec<(F, usize)> = self
            .train
            .iter_rows()
            .enumerate()
            .map(|(i, t)| {
                let d = row
                    .iter()
                    .zip(t)
                    .fold(F::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b));
                (d, i)
            })
            .collect();
        dists.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("non-finite distance")
                .then(a.1.cmp(&b.1))
        });
        let mut votes = vec![0usize; self.num_classes];
        for (_, i) in dists.iter().take(self.k) {
            votes[self.labels[*i]] += 1;
        }
        let mut best = 0usize;
        let mut best_votes = 0usize;
        for (c, &v) in votes.iter().enumerate() {
            if v > best_votes {
                best_votes = v;
                best = c;
            }
        }
        Ok(best)
    }
}

/// Fits kNN on `train` and predicts every row of `test`.
pub fn fit_predict_knn<F: Real>(
    train: &FeatureMatrix<F>,
    labels: &[usize],
    test: &FeatureMatrix<F>,
    k: usize,
) -> Result<Vec<usize>> {
    let model = KnnModel::fit(train.clone(), labels.to_vec(), k)?;
    test.iter_rows().map(|row| model.predict(row)).collect()
}

/// Gaussian naive Bayes with per-class feature means/variances and a
/// variance floor for degenerate (constant) features.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GnbModel<F> {
    pub priors: Vec<F>,
    pub means: Vec<Vec<F>>,
    pub variances: Vec<Vec<F>>,
}

/// Variance floor applied per class and feature; keeps log densities finite
/// on features that are constant within a class.
pub const GNB_VARIANCE_FLOOR: f64 = 1e-9;

impl<F: Real> GnbModel<F> {
    pub fn fit(train: &FeatureMatrix<F>, labels: &[usize]) -> Result<Self> {
        if train.rows() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows vs {} labels",
                train.rows(),
                labels.len()
            )));
        }
        let counts = contiguous_class_counts(labels)?;
        let k = counts.len();
        let dim = train.cols();
        let total = F::from_usize(labels.len()).unwrap();
        let floor = F::from_f64(GNB_VARIANCE_FLOOR).unwrap();

        let mut means = vec![vec![F::zero(); dim]; k];
        for (row, &label) in train.iter_rows().zip(labels) {
            for (m, v) in means[label].iter_mut().zip(row) {
                *m = *m + *v;
            }
        }
        for (mean, &count) in means.iter_mut().zip(&counts) {
            let denom = F::from_usize(count).unwrap();
            for m in mean.iter_mut() {
                *m = *m / denom;
            }
        }

        let mut variances = vec![vec![F::zero(); dim]; k];
        for (row, &label) in train.iter_rows().zip(labels) {
            for ((var, m), v) in variances[label].iter_mut().zip(&means[label]).zip(row) {
                let d = *v - *m;
                *var = *var + d * d;
            }
        }
        for (var, &count) in variances.iter_mut().zip(&counts) {
            let denom = F::from_usize(count).unwrap();
            for v in var.iter_mut() {
                *v = (*v / denom).max(floor);
            }
        }

        let priors = counts
            .iter()
            .map(|&c| F::from_usize(c).unwrap() / total)
            .collect();
        Ok(GnbModel {
            priors,
            means,
            variances,
        })
    }

    /// Log posterior (up to the shared evidence term) for every class:
    /// `ln prior + Σ_j ln Normal(x_j; mean, var)`.
    pub fn log_posteriors(&self, row: &[F]) -> Result<Vec<F>> {
        let dim = self.means.first().map_or(0, Vec::len);
        if row.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "query has {} features, model expects {dim}",
                row.len()
            )));
        }
        let half = F::from_f64(0.5).unwrap();
        let two_pi = F::PI() + F::PI();
        Ok(self
            .priors
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(prior, (means, vars))| {
                let mut lp = prior.ln();
                for ((x, m), v) in row.iter().zip(means).zip(vars) {
                    let d = *x - *m;
                    lp = lp - half * (two_pi * *v).ln() - d * d / (*v + *v);
                }
                lp
            })
            .collect())
    }

    /// Argmax of [`Self::log_posteriors`]; ties go to the lowest label.
    pub fn predict(&self, row: &[F]) -> Result<usize> {
        let lps = self.log_posteriors(row)?;
        let mut best = 0usize;
        let mut best_lp = F::neg_infinity();
        for (c, lp) in lps.into_iter().enumerate() {
            if lp > best_lp {
                best_lp = lp;
                best = c;
            }
        }
        Ok(best)
    }
}

/// Fits GNB on `train` and predicts every row of `test`.
pub fn fit_predict_gnb<F: Real>(
    train: &FeatureMatrix<F>,
    labels: &[usize],
    test: &FeatureMatrix<F>,
) -> Result<Vec<usize>> {
    let model = GnbModel::fit(train, labels)?;
    test.iter_rows().map(|row| model.predict(row)).collect()
}
