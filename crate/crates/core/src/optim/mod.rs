//! Adam and SGD update steps with pluggable learning-rate schedules.
//!
//! The averaging schemes that ride on top of the raw Adam iterates live in
//! [`averaging`]; nothing in this module ever reads an averaged value.

pub mod averaging;

pub use averaging::{Averager, AveragerSpec};

use crate::params::ParamVector;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OptimError {
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite gradient component {value} at index {index}")]
    NonFiniteGradient { index: usize, value: f64 },
}

/// Moment decay rates, denominator shift and mini-batch size for one run.
///
/// `epsilon = 0` is permitted: it turns the first update into an exact
/// sign-descent step, which the diagnostics below rely on. Production runs
/// use the default `1e-8`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub batch_size: usize,
}

impl HyperParams {
    pub fn new(alpha: f64, beta: f64, epsilon: f64, batch_size: usize) -> Self {
        assert!((0.0..1.0).contains(&alpha), "alpha must lie in [0, 1), got {alpha}");
        assert!((0.0..1.0).contains(&beta), "beta must lie in [0, 1), got {beta}");
        assert!(
            epsilon.is_finite() && epsilon >= 0.0,
            "epsilon must be finite and nonnegative, got {epsilon}"
        );
        assert!(batch_size >= 1, "batch_size must be at least 1");
        Self { alpha, beta, epsilon, batch_size }
    }
}

impl Default for HyperParams {
    /// The framework-default choices: alpha 0.9, beta 0.999, epsilon 1e-8.
    fn default() -> Self {
        Self { alpha: 0.9, beta: 0.999, epsilon: 1e-8, batch_size: 1 }
    }
}

/// Step-size sequence, 1-indexed: the first update uses `at(1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LrSchedule {
    Constant { c: f64 },
    /// gamma_n = c * n^(-p).
    PolyDecay { c: f64, p: f64 },
}

impl LrSchedule {
    pub fn constant(c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "learning rate must be positive, got {c}");
        LrSchedule::Constant { c }
    }

    pub fn poly_decay(c: f64, p: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "decay scale must be positive, got {c}");
        assert!(p > 0.0 && p < 1.0, "decay exponent must lie in (0, 1), got {p}");
        LrSchedule::PolyDecay { c, p }
    }

    pub fn at(&self, n: u64) -> f64 {
        assert!(n >= 1, "schedules are 1-indexed; there is no rate for step 0");
        match *self {
            LrSchedule::Constant { c } => c,
            LrSchedule::PolyDecay { c, p } => c * (n as f64).powf(-p),
        }
    }
}

/// Raw Adam iterate together with the moment estimates that drive it.
#[derive(Clone, Debug)]
pub struct AdamState {
    params: ParamVector,
    m: ParamVector,
    v: ParamVector,
    step: u64,
    alpha_prod: f64,
    beta_prod: f64,
}

impl AdamState {
    pub fn new(init: ParamVector) -> Self {
        let dim = init.len();
        Self {
            params: init,
            m: ParamVector::zeros(dim),
            v: ParamVector::zeros(dim),
            step: 0,
            alpha_prod: 1.0,
            beta_prod: 1.0,
        }
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self) -> &ParamVector {
        &self.m
    }

    pub fn second_moment(&self) -> &ParamVector {
        &self.v
    }

    /// Running product of the alpha decay factors over all steps so far.
    pub fn alpha_prod(&self) -> f64 {
        self.alpha_prod
    }

    pub fn beta_prod(&self) -> f64 {
        self.beta_prod
    }
}

fn check_grad(expected: usize, grad: &ParamVector) -> Result<(), OptimError> {
    if grad.len() != expected {
        return Err(OptimError::DimensionMismatch { expected, got: grad.len() });
    }
    if let Some(index) = grad.first_non_finite() {
        return Err(OptimError::NonFiniteGradient { index, value: grad[index] });
    }
    Ok(())
}

/// One Adam update. `grad` is the already-averaged mini-batch gradient at
/// the current raw iterate.
///
/// m <- alpha*m + (1-alpha)*g, v <- beta*v + (1-beta)*g^2 componentwise,
/// then params -= gamma_n * m_hat / (epsilon + sqrt(v_hat)) with the bias
/// corrections m_hat = m/(1 - prod alpha_k), v_hat = v/(1 - prod beta_k).
/// Note the denominator: epsilon is added to the square root of v_hat.
pub fn adam_step(
    state: &mut AdamState,
    hp: &HyperParams,
    sched: &LrSchedule,
    grad: &ParamVector,
) -> Result<(), OptimError> {
    check_grad(state.params.len(), grad)?;
    state.step += 1;
    state.alpha_prod *= hp.alpha;
    state.beta_prod *= hp.beta;
    let gamma = sched.at(state.step);
    let bc1 = 1.0 - state.alpha_prod;
    let bc2 = 1.0 - state.beta_prod;
    for i in 0..grad.len() {
        let g = grad[i];
        state.m[i] = hp.alpha * state.m[i] + (1.0 - hp.alpha) * g;
        state.v[i] = hp.beta * state.v[i] + (1.0 - hp.beta) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        state.params[i] -= gamma * m_hat / (hp.epsilon + v_hat.sqrt());
    }
    Ok(())
}

/// One plain SGD update: params -= gamma_n * grad. `n` is the 1-indexed
/// step number of this update.
pub fn sgd_step(
    params: &mut ParamVector,
    sched: &LrSchedule,
    n: u64,
    grad: &ParamVector,
) -> Result<(), OptimError> {
    check_grad(params.len(), grad)?;
    let gamma = sched.at(n);
    for i in 0..grad.len() {
        params[i] -= gamma * grad[i];
    }
    Ok(())
}
