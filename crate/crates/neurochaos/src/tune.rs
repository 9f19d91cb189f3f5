//! Hyperparameter tuning: grid search over (q, b, ε) scored by stratified
//! k-fold cross-validated macro F1 with the cosine classifier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::chaos::Hyperparams;
use crate::chaosfex::{transform_with, TransformOptions};
use crate::classify::{fit_cosine, predict_cosine_batch};
use crate::error::{Error, Result};
use crate::layer::NeuronLayout;
use crate::metrics::{contiguous_class_counts, macro_f1};
use crate::rng::{stream_rng, FOLD_STREAM};
use crate::Real;

/// Candidate values per hyperparameter axis. Stored sorted ascending,
/// deduplicated, all strictly inside (0,1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<F> {
    q_values: Vec<F>,
    b_values: Vec<F>,
    epsilon_values: Vec<F>,
}

impl<F: Real> Grid<F> {
    /// Builds a grid; each axis is sorted and deduplicated, and every value
    /// must lie strictly inside (0,1).
    pub fn new(q_values: Vec<F>, b_values: Vec<F>, epsilon_values: Vec<F>) -> Result<Self> {
        fn prep<F: Real>(name: &'static str, mut vs: Vec<F>) -> Result<Vec<F>> {
            if vs.is_empty() {
                return Err(Error::param(name, "axis must be non-empty"));
            }
            for v in &vs {
                if !(*v > F::zero() && *v < F::one()) {
                    return Err(Error::param(name, format!("{v} not in (0,1)")));
                }
            }
            vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vs.dedup();
            Ok(vs)
        }
        Ok(Grid {
            q_values: prep("q_values", q_values)?,
            b_values: prep("b_values", b_values)?,
            epsilon_values: prep("epsilon_values", epsilon_values)?,
        })
    }

    /// The built-in search space. It spans every published tuned triple for
    /// this architecture family, so known optima stay reachable; override it
    /// in configuration for faster searches.
    ///
    /// Axes (in thousandths, to keep construction exact):
    /// q: 10..=500 step 10, plus {62, 69, 99};
    /// b: 10..=490 step 10 and 9..=489 step 10, plus {185};
    /// ε: 1..=301 step 10 and 10..=300 step 10, plus {298, 809}.
    pub fn default_search_space() -> Self {
        let of_millis = |m: &mut Vec<u32>| -> Vec<F> {
            m.sort_unstable();
            m.dedup();
            m.iter()
                .map(|&v| F::from_f64(f64::from(v) / 1000.0).unwrap())
                .collect()
        };
        let mut q: Vec<u32> = (1..=50).map(|i| i * 10).chain([62, 69, 99]).collect();
        let mut b: Vec<u32> = (1..=49)
            .map(|i| i * 10)
            .chain((0..=48).map(|i| 9 + i * 10))
            .chain([185])
            .collect();
        let mut eps: Vec<u32> = (0..=30)
            .map(|i| 1 + i * 10)
            .chain((1..=30).map(|i| i * 10))
            .chain([298, 809])
            .collect();
        Grid {
            q_values: of_millis(&mut q),
            b_values: of_millis(&mut b),
            epsilon_values: of_millis(&mut eps),
        }
    }

    pub fn q_values(&self) -> &[F] {
        &self.q_values
    }

    pub fn b_values(&self) -> &[F] {
        &self.b_values
    }

    pub fn epsilon_values(&self) -> &[F] {
        &self.epsilon_values
    }

    /// Exact membership test for a hyperparameter triple.
    pub fn contains(&self, hp: &Hyperparams<F>) -> bool {
        self.q_values.contains(&hp.q)
            && self.b_values.contains(&hp.b)
            && self.epsilon_values.contains(&hp.epsilon)
    }

    pub fn num_points(&self) -> usize {
        self.q_values.len() * self.b_values.len() * self.epsilon_values.len()
    }

    /// All (q, b, ε) combinations in q-major, then b, then ε order.
    pub fn points(&self) -> Vec<Hyperparams<F>> {
        let mut out = Vec::with_capacity(self.num_points());
        for &q in &self.q_values {
            for &b in &self.b_values {
                for &epsilon in &self.epsilon_values {
                    out.push(Hyperparams { q, b, epsilon });
                }
            }
        }
        out
    }
}

/// Splits indices into `k` disjoint folds with per-class counts differing by
/// at most one across folds. Earlier folds receive the remainders.
///
/// Deterministic: one shuffle per class from the fold stream of `seed`.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::param("k", "fold count must be >= 1"));
    }
    let counts = contiguous_class_counts(labels)?;
    if let Some((class, &count)) = counts.iter().enumerate().find(|(_, c)| **c < k) {
        return Err(Error::InfeasibleSplit(format!(
            "class {class} has {count} samples, fewer than {k} folds"
        )));
    }
    let mut rng = stream_rng(seed, FOLD_STREAM);
    let mut folds = vec![Vec::new(); k];
    for class in 0..counts.len() {
        let mut indices: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == class)
            .map(|(i, _)| i)
            .collect();
        use rand::seq::SliceRandom;
        indices.shuffle(&mut rng);
        let base = indices.len() / k;
        let extra = indices.len() % k;
        let mut cursor = 0;
        for (f, fold) in folds.iter_mut().enumerate() {
            let take = base + usize::from(f < extra);
            fold.extend_from_slice(&indices[cursor..cursor + take]);
            cursor += take;
        }
    }
    for fold in folds.iter_mut() {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint<F> {
    pub hyperparams: Hyperparams<F>,
    pub mean_macro_f1: F,
    pub fold_scores: Vec<F>,
}

/// Grid search outcome: the winning triple and the full score table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult<F> {
    pub best: Hyperparams<F>,
    pub best_cv_macro_f1: F,
    pub table: Vec<GridPoint<F>>,
}

impl<F: Real> TuneResult<F> {
    /// One CSV row per grid point: `q,b,epsilon,mean_macro_f1,fold_0..`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let folds = self.table.first().map_or(0, |p| p.fold_scores.len());
        let fold_names: Vec<String> = (0..folds).map(|f| format!("fold_{f}")).collect();
        writeln!(out, "q,b,epsilon,mean_macro_f1,{}", fold_names.join(","))?;
        for point in &self.table {
            let scores: Vec<String> = point.fold_scores.iter().map(|s| format!("{s}")).collect();
            writeln!(
                out,
                "{},{},{},{},{}",
                point.hyperparams.q,
                point.hyperparams.b,
                point.hyperparams.epsilon,
                point.mean_macro_f1,
                scores.join(",")
            )?;
        }
        Ok(())
    }
}

/// Evaluates every grid point by stratified k-fold cross-validation with the
/// cosine classifier and returns the argmax.
///
/// Ties on mean macro F1 are broken toward smaller ε, then smaller q, then
/// smaller b. Evaluation parallelizes over grid points; results are assembled
/// in grid order so the outcome is independent of scheduling.
pub fn grid_search<F: Real>(
    x_train: &[Vec<F>],
    y_train: &[usize],
    layout: &NeuronLayout,
    grid: &Grid<F>,
    k: usize,
    cap: usize,
    seed: u64,
) -> Result<TuneResult<F>> {
    let opts = TransformOptions {
        cap,
        ..TransformOptions::default()
    };
    grid_search_with(x_train, y_train, layout, grid, k, seed, &opts)
}

/// [`grid_search`] with explicit transform options (e.g. unnormalized
/// features). `opts.cap` is the iteration bound used for every grid point.
pub fn grid_search_with<F: Real>(
    x_train: &[Vec<F>],
    y_train: &[usize],
    layout: &NeuronLayout,
    grid: &Grid<F>,
    k: usize,
    seed: u64,
    opts: &TransformOptions,
) -> Result<TuneResult<F>> {
    if x_train.len() != y_train.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples vs {} labels",
            x_train.len(),
            y_train.len()
        )));
    }
    if k < 2 {
        return Err(Error::param("k", "cross-validation needs >= 2 folds"));
    }
    let num_classes = contiguous_class_counts(y_train)?.len();
    let folds = stratified_folds(y_train, k, seed)?;
    // Complementary training indices per fold, ascending.
    let train_sets: Vec<Vec<usize>> = (0..k)
        .map(|f| {
            let mut in_fold = vec![false; y_train.len()];
            for &i in &folds[f] {
                in_fold[i] = true;
            }
            (0..y_train.len()).filter(|i| !in_fold[*i]).collect()
        })
        .collect();

    let evaluate = |hp: &Hyperparams<F>| -> Result<GridPoint<F>> {
        // Features do not depend on the fold split, so transform once per
        // grid point and slice per fold.
        let features = transform_with(x_train, layout, hp, opts)?.features;
        let mut fold_scores = Vec::with_capacity(k);
        for f in 0..k {
            let train_idx = &train_sets[f];
            let val_idx = &folds[f];
            let train_y: Vec<usize> = train_idx.iter().map(|&i| y_train[i]).collect();
            let val_y: Vec<usize> = val_idx.iter().map(|&i| y_train[i]).collect();
            let model = fit_cosine(&features.select_rows(train_idx), &train_y)?;
            let preds = predict_cosine_batch(&model, &features.select_rows(val_idx))?;
            fold_scores.push(macro_f1(&val_y, &preds, num_classes)?);
        }
        let mean = fold_scores.iter().fold(F::zero(), |a, s| a + *s) / F::from_usize(k).unwrap();
        Ok(GridPoint {
            hyperparams: *hp,
            mean_macro_f1: mean,
            fold_scores,
        })
    };

    let points = grid.points();
    let table: Vec<GridPoint<F>> = points
        .par_iter()
        .map(evaluate)
        .collect::<Result<Vec<_>>>()?;

    let mut best = &table[0];
    for point in &table[1..] {
        let better = point.mean_macro_f1 > best.mean_macro_f1
            || (point.mean_macro_f1 == best.mean_macro_f1
                && (point.hyperparams.epsilon < best.hyperparams.epsilon
                    || (point.hyperparams.epsilon == best.hyperparams.epsilon
                        && (point.hyperparams.q < best.hyperparams.q
                            || (point.hyperparams.q == best.hyperparams.q
                                && point.hyperparams.b < best.hyperparams.b)))));
        if better {
            best = point;
        }
    }
    Ok(TuneResult {
        best: best.hyperparams,
        best_cv_macro_f1: best.mean_macro_f1,
        table,
    })
}
