//! Chaotic 1-D maps, neural trace generation, and Lyapunov exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// Default iteration bound for trace generation. The trajectory may never
/// enter the ε-ball of the stimulus; the cap keeps the pipeline total.
pub const DEFAULT_CAP: usize = 10_000;

/// A one-dimensional chaotic map on [0,1).
///
/// Invariant maintained by [`map_step`]: outputs stay in [0,1). An image of
/// exactly 1.0 (logistic at x=0.5, skew-tent at the branch point) is clamped
/// to `1 - ε_machine` so iteration never exits the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChaoticMap<F> {
    /// Piecewise-linear tent map with branch point `skew` ∈ (0,1):
    /// `z/skew` on [0,skew), `(1-z)/(1-skew)` on [skew,1).
    SkewTent { skew: F },
    /// Quadratic map `x ↦ r·x·(1-x)` with `r` ∈ (0,4]. Fully chaotic at r=4.
    Logistic { r: F },
}

impl<F: Real> ChaoticMap<F> {
    /// Skew-tent map; `skew` must lie strictly inside (0,1).
    pub fn skew_tent(skew: F) -> Result<Self> {
        if !(skew > F::zero() && skew < F::one()) {
            return Err(Error::param("skew", format!("{skew} not in (0,1)")));
        }
        Ok(ChaoticMap::SkewTent { skew })
    }

    /// Logistic map; `r` must lie in (0,4].
    pub fn logistic(r: F) -> Result<Self> {
        let four = F::from_f64(4.0).unwrap();
        if !(r > F::zero() && r <= four) {
            return Err(Error::param("r", format!("{r} not in (0,4]")));
        }
        Ok(ChaoticMap::Logistic { r })
    }

    /// Logistic map at r = 4, the fully chaotic setting used for neurons.
    pub fn logistic_chaotic() -> Self {
        ChaoticMap::Logistic {
            r: F::from_f64(4.0).unwrap(),
        }
    }

    /// One iteration of the map.
    pub fn step(&self, state: F) -> F {
        map_step(*self, state)
    }
}

/// Applies one step of `map` to `state` ∈ [0,1), returning a value in [0,1).
pub fn map_step<F: Real>(map: ChaoticMap<F>, state: F) -> F {
    debug_assert!(
        state >= F::zero() && state < F::one(),
        "state outside [0,1)"
    );
    let next = match map {
        ChaoticMap::SkewTent { skew } => {
            if state < skew {
                state / skew
            } else {
                (F::one() - state) / (F::one() - skew)
            }
        }
        ChaoticMap::Logistic { r } => r * state * (F::one() - state),
    };
    if next >= F::one() {
        F::one() - F::epsilon()
    } else {
        next
    }
}

/// Trajectory of a chaotic neuron from initial activity `q` toward a stimulus.
///
/// `values` always starts with `q` and, when `detected`, ends with the first
/// element strictly within ε of the stimulus. `firing_time == values.len()`,
/// so immediate detection gives firing time 1, never 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralTrace<F> {
    pub values: Vec<F>,
    pub firing_time: usize,
    pub detected: bool,
}

/// Iterates `map` from `q` until the trajectory lands strictly within
/// `epsilon` of `stimulus`, or `cap` values have been produced.
///
/// Non-detection is reported through the `detected` flag, not an error; the
/// truncated trace still has well-defined features.
pub fn generate_trace<F: Real>(
    map: ChaoticMap<F>,
    q: F,
    stimulus: F,
    epsilon: F,
    cap: usize,
) -> NeuralTrace<F> {
    debug_assert!(cap >= 1, "cap must be positive");
    let mut values = Vec::new();
    let mut state = q;
    loop {
        values.push(state);
        if (state - stimulus).abs() < epsilon {
            let firing_time = values.len();
            return NeuralTrace {
                values,
                firing_time,
                detected: true,
            };
        }
        if values.len() == cap {
            return NeuralTrace {
                values,
                firing_time: cap,
                detected: false,
            };
        }
        state = map_step(map, state);
    }
}

/// Estimates the Lyapunov exponent `(1/k) Σ ln |G'(x_j)|` over `iterations`
/// post-burn-in iterates starting from `x0`.
///
/// Points where the derivative does not exist (skew-tent branch point) or is
/// zero (logistic at x = 0.5) contribute no term; the trajectory is extended
/// so `iterations` valid terms are still averaged. Such skips are logged at
/// debug level and are measure-zero in practice.
pub fn lyapunov<F: Real>(
    map: ChaoticMap<F>,
    x0: F,
    iterations: usize,
    burn_in: usize,
) -> Result<F> {
    if !(x0 > F::zero() && x0 < F::one()) {
        return Err(Error::param("x0", format!("{x0} not in (0,1)")));
    }
    if iterations == 0 {
        return Err(Error::param("iterations", "must be >= 1"));
    }
    let mut x = x0;
    for _ in 0..burn_in {
        x = map_step(map, x);
    }
    let mut sum = F::zero();
    let mut counted = 0usize;
    let mut skipped = 0usize;
    // Hard bound: a skip requires landing exactly on one point of [0,1), so
    // consecutive skips are vanishingly unlikely; the bound only guards
    // against a pathological cycle through non-differentiable points.
    let max_steps = iterations.saturating_mul(2).saturating_add(1_000);
    for _ in 0..max_steps {
        if counted == iterations {
            break;
        }
        match log_abs_derivative(map, x) {
            Some(term) => {
                sum = sum + term;
                counted += 1;
            }
            None => skipped += 1,
        }
        x = map_step(map, x);
    }
    if skipped > 0 {
        log::debug!("lyapunov: skipped {skipped} non-differentiable point(s)");
    }
    Ok(sum / F::from_usize(counted).unwrap())
}

/// `ln |G'(x)|`, or `None` where the derivative is absent or zero.
fn log_abs_derivative<F: Real>(map: ChaoticMap<F>, x: F) -> Option<F> {
    match map {
        ChaoticMap::SkewTent { skew } => {
            if x == skew {
                None
            } else if x < skew {
                Some(-skew.ln())
            } else {
                Some(-(F::one() - skew).ln())
            }
        }
        ChaoticMap::Logistic { r } => {
            let two = F::from_f64(2.0).unwrap();
            let d = r * (F::one() - two * x);
            if d == F::zero() {
                None
            } else {
                Some(d.abs().ln())
            }
        }
    }
}

/// Analytic Lyapunov exponent of the skew-tent map:
/// `-b·ln b - (1-b)·ln(1-b)`.
pub fn skew_tent_lyapunov_exact<F: Real>(skew: F) -> F {
    -(skew * skew.ln()) - (F::one() - skew) * (F::one() - skew).ln()
}

/// The (q, b, ε) triple controlling trace generation.
///
/// `b` plays a dual role: skew-tent branch point and the discrimination
/// threshold used by firing rate and entropy. Logistic neurons use `b` only
/// as the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams<F> {
    /// Initial neural activity, in (0,1).
    pub q: F,
    /// Skew-tent branch point and discrimination threshold, in (0,1).
    pub b: F,
    /// Detection radius around the stimulus, in (0,1).
    pub epsilon: F,
}

impl<F: Real> Hyperparams<F> {
    pub fn new(q: F, b: F, epsilon: F) -> Result<Self> {
        fn check<F: Real>(name: &'static str, v: F) -> Result<()> {
            if v > F::zero() && v < F::one() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} not in (0,1)")))
            }
        }
        check("q", q)?;
        check("b", b)?;
        check("epsilon", epsilon)?;
        Ok(Hyperparams { q, b, epsilon })
    }
}
