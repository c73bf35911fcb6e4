//! Stochastic minimization problems: each one turns an RNG handle into a
//! sampled batch and reports the loss and exact parameter gradient at the
//! current parameters, plus a deterministic test metric against analytic
//! ground truth.
//!
//! Batch draw order is part of the determinism contract: a batch first draws
//! every input row in order, then one target-noise draw per sample (or one
//! diffusion row per sample for the heat problem).

pub mod heat;
pub mod poly;
pub mod quadrature;
pub mod supervised;

pub use heat::{HeatDkm, HeatProblem};
pub use poly::PolyRegression;
pub use supervised::{SupervisedProblem, SupervisedTarget};

use crate::nn::{self, Matrix, MlpSpec};
use crate::params::ParamVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A stochastic minimization problem as seen by the training loop.
pub trait StochasticProblem: Sync {
    fn param_dim(&self) -> usize;

    /// Initial parameters, drawn from the dedicated init stream.
    fn init_params(&self, rng: &mut ChaCha8Rng) -> ParamVector;

    /// Draws a fresh batch and returns the batch loss together with its
    /// exact gradient at `params`.
    fn sample_loss_grad(
        &self,
        params: &ParamVector,
        batch_size: usize,
        rng: &mut ChaCha8Rng,
    ) -> (f64, ParamVector);

    /// Builds the fixed evaluation set once per run from the test stream.
    fn test_set(&self, n_points: usize, rng: &mut ChaCha8Rng) -> TestSet;

    /// Deterministic, noise-free test error of `params` on `test_set`.
    fn test_error(&self, params: &ParamVector, test_set: &TestSet) -> f64;
}

/// Evaluation data for [`StochasticProblem::test_error`]. The polynomial
/// problem measures its error by quadrature and needs no sampled points.
pub enum TestSet {
    Quadrature,
    Points { inputs: Matrix, truth: Vec<f64> },
}

/// sqrt(sum (pred - truth)^2) / sqrt(sum truth^2). An all-zero prediction
/// scores exactly 1 because numerator and denominator are then the same sum.
pub fn relative_l2(pred: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(pred.len(), truth.len(), "prediction and truth lengths differ");
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, t) in pred.iter().zip(truth) {
        num += (p - t) * (p - t);
        den += t * t;
    }
    assert!(den > 0.0, "ground truth is identically zero");
    num.sqrt() / den.sqrt()
}

/// Mean squared error over single-output network predictions and its
/// parameter gradient, with the 1/J factor folded into the output gradient.
pub(crate) fn mse_loss_grad(
    net: &MlpSpec,
    params: &ParamVector,
    inputs: &Matrix,
    targets: &[f64],
) -> (f64, ParamVector) {
    let j = inputs.rows();
    assert_eq!(targets.len(), j, "one target per input row");
    let (out, tape) = nn::forward(net, params, inputs);
    let mut loss = 0.0;
    let mut og = Matrix::zeros(j, 1);
    for r in 0..j {
        let resid = out.row(r)[0] - targets[r];
        loss += resid * resid;
        og.row_mut(r)[0] = 2.0 * resid / j as f64;
    }
    (loss / j as f64, nn::backward(net, params, tape, &og))
}

/// Rows of independent U[-half_width, half_width) coordinates.
pub(crate) fn uniform_batch(
    rng: &mut ChaCha8Rng,
    rows: usize,
    dim: usize,
    half_width: f64,
) -> Matrix {
    let data = (0..rows * dim).map(|_| rng.gen_range(-half_width..half_width)).collect();
    Matrix::from_vec(rows, dim, data)
}

pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn problems() -> Vec<Box<dyn StochasticProblem>> {
        vec![
            Box::new(PolyRegression::new()),
            Box::new(SupervisedProblem::cubic()),
            Box::new(SupervisedProblem::gauss_density()),
            Box::new(HeatProblem::new()),
        ]
    }

    #[test]
    fn relative_l2_of_perfect_prediction_is_zero() {
        let truth = vec![1.0, -2.0, 3.5];
        assert_eq!(relative_l2(&truth, &truth), 0.0);
    }

    #[test]
    fn relative_l2_of_zero_prediction_is_exactly_one() {
        let truth = vec![40.0, 41.5, 47.25, 39.0];
        let zeros = vec![0.0; truth.len()];
        assert_eq!(relative_l2(&zeros, &truth), 1.0);
    }

    #[test]
    fn relative_l2_tracks_small_perturbations() {
        let truth: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let pred: Vec<f64> = truth.iter().map(|t| t * (1.0 + 1e-8)).collect();
        let e = relative_l2(&pred, &truth);
        assert!((e - 1e-8).abs() < 1e-10);
    }

    #[test]
    fn sampled_loss_grad_is_deterministic_per_seed() {
        for p in problems() {
            let mut r1 = ChaCha8Rng::seed_from_u64(77);
            let params = p.init_params(&mut ChaCha8Rng::seed_from_u64(5));
            let (l1, g1) = p.sample_loss_grad(&params, 8, &mut r1);
            let mut r2 = ChaCha8Rng::seed_from_u64(77);
            let (l2, g2) = p.sample_loss_grad(&params, 8, &mut r2);
            assert_eq!(l1, l2);
            assert_eq!(*g1, *g2);
            assert!(l1.is_finite() && l1 >= 0.0);
        }
    }

    #[test]
    fn init_params_have_declared_dimension() {
        for p in problems() {
            let params = p.init_params(&mut ChaCha8Rng::seed_from_u64(1));
            assert_eq!(params.len(), p.param_dim());
        }
    }

    #[test]
    fn test_sets_are_reproducible_and_noise_free() {
        for p in problems() {
            let a = p.test_set(64, &mut ChaCha8Rng::seed_from_u64(3));
            let b = p.test_set(64, &mut ChaCha8Rng::seed_from_u64(3));
            match (a, b) {
                (TestSet::Quadrature, TestSet::Quadrature) => {}
                (
                    TestSet::Points { inputs: ia, truth: ta },
                    TestSet::Points { inputs: ib, truth: tb },
                ) => {
                    assert_eq!(ia, ib);
                    assert_eq!(ta, tb);
                    assert_eq!(ia.rows(), 64);
                }
                _ => panic!("test set variants differ between identical seeds"),
            }
        }
    }
}
