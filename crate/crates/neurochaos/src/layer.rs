//! Input-layer neuron layouts: which chaotic map drives each input feature.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, LAYOUT_STREAM};

/// The species of chaotic neuron at one input position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NeuronKind {
    /// Skew-tent (generalized Lüroth series) neuron.
    #[serde(rename = "GLS")]
    Gls,
    /// Logistic neuron at r = 4.
    Logistic,
}

/// How neuron kinds are assigned to input positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayoutScheme {
    /// Every position is a skew-tent neuron.
    #[serde(rename = "HomogeneousGLS")]
    HomogeneousGls,
    /// Every position is a logistic neuron.
    HomogeneousLogistic,
    /// Odd 1-based positions are skew-tent, even positions logistic.
    OddEven,
    /// A uniform random subset of `round_half_up(p·n)` positions is logistic.
    RandomHeterogeneous,
}

/// An immutable assignment of neuron kinds to the n input positions.
///
/// Regenerating with the same `(n, scheme, proportion, seed)` always yields
/// an identical layout; the seed is recorded for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronLayout {
    pub scheme: LayoutScheme,
    pub n: usize,
    pub proportion_logistic: f64,
    pub seed: u64,
    pub kinds: Vec<NeuronKind>,
}

impl NeuronLayout {
    /// Number of input positions.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// How many positions carry a logistic neuron.
    pub fn logistic_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| **k == NeuronKind::Logistic)
            .count()
    }
}

/// `round(x)` with halves rounding up; used to realize proportions exactly.
fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Builds a neuron layout for `n` input features.
///
/// `proportion_logistic` only influences `RandomHeterogeneous` placements but
/// is validated (and recorded) for every scheme. Logistic positions are drawn
/// uniformly without replacement from the layout stream of `seed`.
pub fn build_layout(
    n: usize,
    scheme: LayoutScheme,
    proportion_logistic: f64,
    seed: u64,
) -> Result<NeuronLayout> {
    if n == 0 {
        return Err(Error::param("n", "layout needs at least one position"));
    }
    if !(0.0..=1.0).contains(&proportion_logistic) {
        return Err(Error::param(
            "proportion_logistic",
            format!("{proportion_logistic} not in [0,1]"),
        ));
    }
    let kinds = match scheme {
        LayoutScheme::HomogeneousGls => vec![NeuronKind::Gls; n],
        LayoutScheme::HomogeneousLogistic => vec![NeuronKind::Logistic; n],
        LayoutScheme::OddEven => (0..n)
            .map(|i| {
                if i % 2 == 0 {
                    NeuronKind::Gls
                } else {
                    NeuronKind::Logistic
                }
            })
            .collect(),
        LayoutScheme::RandomHeterogeneous => {
            let count = round_half_up(proportion_logistic * n as f64);
            let mut kinds = vec![NeuronKind::Gls; n];
            let mut rng = stream_rng(seed, LAYOUT_STREAM);
            for pos in sample(&mut rng, n, count) {
                kinds[pos] = NeuronKind::Logistic;
            }
            kinds
        }
    };
    Ok(NeuronLayout {
        scheme,
        n,
        proportion_logistic,
        seed,
        kinds,
    })
}
