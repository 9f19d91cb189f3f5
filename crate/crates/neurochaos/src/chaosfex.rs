//! The m×n → m×4n chaotic feature transform.
//!
//! Each input feature j drives one chaotic neuron (per the layout). The
//! neuron's trace toward the stimulus is summarized by four features stored
//! in columns `[4j .. 4j+4)`: normalized firing time, firing rate, normalized
//! energy, and entropy.

use rayon::prelude::*;
use std::io::Write;

use crate::chaos::{generate_trace, ChaoticMap, Hyperparams, NeuralTrace, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::layer::{NeuronKind, NeuronLayout};
use crate::Real;

/// Features emitted per neuron: (firing time, firing rate, energy, entropy).
pub const FEATURES_PER_NEURON: usize = 4;

/// Dense row-major matrix of extracted features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> FeatureMatrix<F> {
    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(FeatureMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[F]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix<F> {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Column names: `f<j>_<time|rate|energy|entropy>` for 4-per-neuron
    /// layouts, plain `c<j>` otherwise.
    pub fn column_names(&self) -> Vec<String> {
        if self.cols.is_multiple_of(FEATURES_PER_NEURON) && self.cols > 0 {
            let names = ["time", "rate", "energy", "entropy"];
            (0..self.cols)
                .map(|c| format!("f{}_{}", c / 4, names[c % 4]))
                .collect()
        } else {
            (0..self.cols).map(|c| format!("c{c}")).collect()
        }
    }

    /// Writes the matrix as CSV with a header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.column_names().join(","))?;
        for row in self.iter_rows() {
            let mut line = String::new();
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v}"));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Fraction of trace values at or above the discrimination threshold `b`
/// (the symbol-1 rule: values with `b ≤ c < 1`).
pub fn firing_rate<F: Real>(trace: &NeuralTrace<F>, b: F) -> F {
    let above = trace.values.iter().filter(|c| **c >= b).count();
    F::from_usize(above).unwrap() / F::from_usize(trace.values.len()).unwrap()
}

/// Trace energy: the sum of squared values. Bounded by the trace length.
pub fn energy<F: Real>(trace: &NeuralTrace<F>) -> F {
    trace.values.iter().fold(F::zero(), |acc, c| acc + *c * *c)
}

/// First-order Shannon entropy (in bits, so within [0,1]) of the trace
/// binarized at threshold `b`, with 0·log 0 := 0.
pub fn entropy<F: Real>(trace: &NeuralTrace<F>, b: F) -> F {
    let m = trace.values.len();
    let ones = trace.values.iter().filter(|c| **c >= b).count();
    if ones == 0 || ones == m {
        return F::zero();
    }
    let p1 = F::from_usize(ones).unwrap() / F::from_usize(m).unwrap();
    let p0 = F::one() - p1;
    -(p1 * p1.log2() + p0 * p0.log2())
}

/// Knobs for [`transform_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    /// Trace iteration bound.
    pub cap: usize,
    /// Divide firing time by `cap` and energy by the trace length, bounding
    /// every feature in [0,1]. Disable to get raw firing times and energies.
    pub normalize: bool,
    /// Parallelize over samples. Output is bit-identical either way.
    pub parallel: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            cap: DEFAULT_CAP,
            normalize: true,
            parallel: true,
        }
    }
}

/// A feature matrix plus how many traces hit the iteration cap undetected.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed<F> {
    pub features: FeatureMatrix<F>,
    pub non_detections: u64,
}

/// Extracts normalized features with the default options (see
/// [`transform_with`] for the knobs and the non-detection count).
pub fn transform<F: Real>(
    x: &[Vec<F>],
    layout: &NeuronLayout,
    hp: &Hyperparams<F>,
    cap: usize,
) -> Result<FeatureMatrix<F>> {
    let opts = TransformOptions {
        cap,
        ..TransformOptions::default()
    };
    Ok(transform_with(x, layout, hp, &opts)?.features)
}

/// Runs every sample through the neuron layer and collects the 4-per-neuron
/// features. Rows must match the layout length and lie in [0,1].
pub fn transform_with<F: Real>(
    x: &[Vec<F>],
    layout: &NeuronLayout,
    hp: &Hyperparams<F>,
    opts: &TransformOptions,
) -> Result<Transformed<F>> {
    if opts.cap == 0 {
        return Err(Error::param("cap", "must be >= 1"));
    }
    let hp = Hyperparams::new(hp.q, hp.b, hp.epsilon)?;
    let n = layout.len();
    for (i, row) in x.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "sample {i} has {} features, layout expects {n}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if !(*v >= F::zero() && *v <= F::one()) {
                return Err(Error::Domain(format!(
                    "sample {i}, feature {j}: {v} outside [0,1]"
                )));
            }
        }
    }

    let maps: Vec<ChaoticMap<F>> = layout
        .kinds
        .iter()
        .map(|kind| match kind {
            NeuronKind::Gls => ChaoticMap::SkewTent { skew: hp.b },
            NeuronKind::Logistic => ChaoticMap::logistic_chaotic(),
        })
        .collect();
    let cap_f = F::from_usize(opts.cap).unwrap();

    let extract_row = |row: &Vec<F>| -> (Vec<F>, u64) {
        let mut feats = vec![F::zero(); FEATURES_PER_NEURON * n];
        let mut misses = 0u64;
        for (j, (&map, &stimulus)) in maps.iter().zip(row.iter()).enumerate() {
            let trace = generate_trace(map, hp.q, stimulus, hp.epsilon, opts.cap);
            if !trace.detected {
                misses += 1;
            }
            let m = F::from_usize(trace.firing_time).unwrap();
            let raw_energy = energy(&trace);
            let (time, en) = if opts.normalize {
                (m / cap_f, raw_energy / m)
            } else {
                (m, raw_energy)
            };
            let base = FEATURES_PER_NEURON * j;
            feats[base] = time;
            feats[base + 1] = firing_rate(&trace, hp.b);
            feats[base + 2] = en;
            feats[base + 3] = entropy(&trace, hp.b);
        }
        (feats, misses)
    };

    let extracted: Vec<(Vec<F>, u64)> = if opts.parallel {
        x.par_iter().map(extract_row).collect()
    } else {
        x.iter().map(extract_row).collect()
    };

    let mut data = Vec::with_capacity(x.len() * FEATURES_PER_NEURON * n);
    let mut non_detections = 0u64;
    for (feats, misses) in extracted {
        data.extend_from_slice(&feats);
        non_detections += misses;
    }
    Ok(Transformed {
        features: FeatureMatrix {
            rows: x.len(),
            cols: FEATURES_PER_NEURON * n,
            data,
        },
        non_detections,
    })
}
