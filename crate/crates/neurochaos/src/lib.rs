//! Neurochaos learning: chaotic-map feature extraction and classification.
//!
//! The pipeline turns an m×n matrix of [0,1]-normalized samples into an m×4n
//! feature matrix by driving one chaotic 1-D neuron per input feature: each
//! neuron iterates from an initial activity `q` until its trajectory enters
//! the open ε-ball around the stimulus, and the resulting trace is summarized
//! by four features (firing time, firing rate, energy, entropy). A
//! nearest-mean cosine classifier — or plain kNN / Gaussian naive Bayes —
//! runs on top of those features.
//!
//! Modules follow the pipeline order:
//!
//! * [`chaos`] — skew-tent and logistic maps, trace generation, Lyapunov
//!   exponent estimation.
//! * [`layer`] — input-layer neuron layouts (homogeneous, odd-even, random
//!   heterogeneous placements).
//! * [`chaosfex`] — the m×n → m×4n feature transform.
//! * [`classify`] — cosine mean-representation, kNN, and GNB classifiers.
//! * [`metrics`] — accuracy, per-class precision/recall/F1, macro F1.
//! * [`tune`] — stratified k-fold grid search over (q, b, ε).
//! * [`dataio`] — CSV loading, min-max normalization, seeded splits.
//!
//! All numeric kernels are generic over [`Real`]; `f64` aliases for the
//! common instantiation live at the crate root.

pub mod chaos;
pub mod chaosfex;
pub mod classify;
pub mod dataio;
pub mod error;
pub mod layer;
pub mod metrics;
pub mod rng;
pub mod tune;

pub use error::{Error, Result};

use std::fmt::{Debug, Display};

/// Scalar abstraction for every numeric kernel in the crate.
///
/// Implemented for `f32` and `f64`; anything satisfying the bounds works.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::FloatConst
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Double-precision chaotic map.
pub type Map64 = chaos::ChaoticMap<f64>;
/// Double-precision neural trace.
pub type Trace64 = chaos::NeuralTrace<f64>;
/// Double-precision hyperparameter triple.
pub type Hyperparams64 = chaos::Hyperparams<f64>;
/// Double-precision feature matrix.
pub type Features64 = chaosfex::FeatureMatrix<f64>;
/// Double-precision cosine class model.
pub type ClassModel64 = classify::ClassModel<f64>;
/// Double-precision dataset.
pub type Dataset64 = dataio::Dataset<f64>;
/// Double-precision tuning grid.
pub type Grid64 = tune::Grid<f64>;
