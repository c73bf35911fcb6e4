//! Supervised regression of two closed-form target functions.

use super::{mse_loss_grad, standard_normal, uniform_batch, StochasticProblem, TestSet};
use crate::nn::{self, Activation, MlpSpec};
use crate::params::ParamVector;
use rand_chacha::ChaCha8Rng;

/// Closed-form regression target with its input law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupervisedTarget {
    /// f(x) = 1 + sum_i (d+1-2i) x_i^3 on [-1,1]^6, noise-free targets.
    Cubic,
    /// f(x) = exp(-|x|^2 / 6) on [-2,2]^20, target noise of variance 1/5.
    GaussDensity,
}

impl SupervisedTarget {
    pub fn input_dim(self) -> usize {
        match self {
            SupervisedTarget::Cubic => 6,
            SupervisedTarget::GaussDensity => 20,
        }
    }

    /// Half-width of the uniform input box.
    pub fn half_width(self) -> f64 {
        match self {
            SupervisedTarget::Cubic => 1.0,
            SupervisedTarget::GaussDensity => 2.0,
        }
    }

    pub fn noise_std(self) -> f64 {
        match self {
            SupervisedTarget::Cubic => 0.0,
            SupervisedTarget::GaussDensity => (1.0f64 / 5.0).sqrt(),
        }
    }

    pub fn value(self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.input_dim(), "input dimension mismatch");
        match self {
            SupervisedTarget::Cubic => {
                let d = x.len() as f64;
                let mut s = 1.0;
                for (i, &xi) in x.iter().enumerate() {
                    let c = d + 1.0 - 2.0 * (i as f64 + 1.0);
                    s += c * xi * xi * xi;
                }
                s
            }
            SupervisedTarget::GaussDensity => {
                let sq: f64 = x.iter().map(|&xi| xi * xi).sum();
                (-sq / 6.0).exp()
            }
        }
    }
}

/// A network trained to regress one of the closed-form targets from noisy
/// samples of its graph.
pub struct SupervisedProblem {
    target: SupervisedTarget,
    net: MlpSpec,
}

impl SupervisedProblem {
    pub fn cubic() -> Self {
        Self::with_net(
            SupervisedTarget::Cubic,
            MlpSpec::new(vec![6, 64, 64, 1], Activation::Relu),
        )
    }

    pub fn gauss_density() -> Self {
        Self::with_net(
            SupervisedTarget::GaussDensity,
            MlpSpec::new(vec![20, 50, 100, 50, 1], Activation::Relu),
        )
    }

    /// Same target with a custom (typically reduced) architecture.
    pub fn with_net(target: SupervisedTarget, net: MlpSpec) -> Self {
        assert_eq!(net.input_dim(), target.input_dim(), "network input width must match");
        assert_eq!(net.output_dim(), 1, "regression network must have one output");
        SupervisedProblem { target, net }
    }

    pub fn target(&self) -> SupervisedTarget {
        self.target
    }

    pub fn net(&self) -> &MlpSpec {
        &self.net
    }
}

impl StochasticProblem for SupervisedProblem {
    fn param_dim(&self) -> usize {
        self.net.param_count()
    }

    fn init_params(&self, rng: &mut ChaCha8Rng) -> ParamVector {
        nn::init_params(&self.net, rng)
    }

    fn sample_loss_grad(
        &self,
        params: &ParamVector,
        batch_size: usize,
        rng: &mut ChaCha8Rng,
    ) -> (f64, ParamVector) {
        let d = self.target.input_dim();
        let inputs = uniform_batch(rng, batch_size, d, self.target.half_width());
        let sigma = self.target.noise_std();
        let targets: Vec<f64> = (0..batch_size)
            .map(|r| self.target.value(inputs.row(r)) + sigma * standard_normal(rng))
            .collect();
        mse_loss_grad(&self.net, params, &inputs, &targets)
    }

    fn test_set(&self, n_points: usize, rng: &mut ChaCha8Rng) -> TestSet {
        let d = self.target.input_dim();
        let inputs = uniform_batch(rng, n_points, d, self.target.half_width());
        let truth = (0..n_points).map(|r| self.target.value(inputs.row(r))).collect();
        TestSet::Points { inputs, truth }
    }

    fn test_error(&self, params: &ParamVector, test_set: &TestSet) -> f64 {
        match test_set {
            TestSet::Points { inputs, truth } => {
                let out = nn::predict(&self.net, params, inputs);
                super::relative_l2(out.data(), truth)
            }
            TestSet::Quadrature => panic!("supervised problems evaluate on a sampled test set"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cubic_values_at_landmark_points() {
        let t = SupervisedTarget::Cubic;
        assert_eq!(t.value(&[0.0; 6]), 1.0);
        assert_eq!(t.value(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 6.0);
        assert_eq!(t.value(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]), -4.0);
        // coefficients are 5, 3, 1, -1, -3, -5
        assert_eq!(t.value(&[1.0; 6]), 1.0);
    }

    #[test]
    fn cubic_is_odd_around_its_constant() {
        let t = SupervisedTarget::Cubic;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            assert!((t.value(&x) + t.value(&neg) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_density_bounded_and_peaked_at_origin() {
        let t = SupervisedTarget::GaussDensity;
        assert_eq!(t.value(&[0.0; 20]), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..20).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v = t.value(&x);
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn zero_network_cubic_loss_matches_target_second_moment() {
        // E[f^2] = 1 + (25+9+1+1+9+25) * E[x^6] = 1 + 70/7 = 11 on U[-1,1]^6.
        let prob = SupervisedProblem::with_net(
            SupervisedTarget::Cubic,
            MlpSpec::new(vec![6, 8, 1], Activation::Relu),
        );
        let zero = ParamVector::zeros(prob.param_dim());
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut total = 0.0;
        let chunks = 10;
        for _ in 0..chunks {
            let (loss, _) = prob.sample_loss_grad(&zero, 100_000, &mut rng);
            total += loss;
        }
        let mean = total / chunks as f64;
        assert!((mean - 11.0).abs() < 0.05, "mc mean {mean}");
    }

    #[test]
    fn zero_network_gauss_loss_includes_noise_variance() {
        // E[(f + sigma Z)^2] = E[f^2] + 1/5 with
        // E[f^2] = (sqrt(3 pi) erf(2/sqrt(3)) / 4)^20.
        let prob = SupervisedProblem::with_net(
            SupervisedTarget::GaussDensity,
            MlpSpec::new(vec![20, 8, 1], Activation::Relu),
        );
        let zero = ParamVector::zeros(prob.param_dim());
        let per_coord = (3.0 * std::f64::consts::PI).sqrt()
            * libm::erf(2.0 / 3.0f64.sqrt())
            / 4.0;
        let expected = 0.2 + per_coord.powi(20);
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut total = 0.0;
        let chunks = 10;
        for _ in 0..chunks {
            let (loss, _) = prob.sample_loss_grad(&zero, 100_000, &mut rng);
            total += loss;
        }
        let mean = total / chunks as f64;
        assert!((mean - expected).abs() < 0.005, "mc mean {mean} vs {expected}");
    }

    #[test]
    fn grad_matches_central_differences_on_reduced_net() {
        let prob = SupervisedProblem::with_net(
            SupervisedTarget::Cubic,
            MlpSpec::new(vec![6, 8, 1], Activation::Gelu),
        );
        let mut init_rng = ChaCha8Rng::seed_from_u64(7);
        let params = prob.init_params(&mut init_rng);
        let batch_rng = ChaCha8Rng::seed_from_u64(400);
        let (_, grad) = prob.sample_loss_grad(&params, 4, &mut batch_rng.clone());
        let h = 1e-5;
        for k in 0..prob.param_dim() {
            let mut plus = params.clone();
            plus[k] += h;
            let mut minus = params.clone();
            minus[k] -= h;
            let lp = prob.sample_loss_grad(&plus, 4, &mut batch_rng.clone()).0;
            let lm = prob.sample_loss_grad(&minus, 4, &mut batch_rng.clone()).0;
            let numeric = (lp - lm) / (2.0 * h);
            // denominator floor sits far above the central-difference noise
            // so near-zero gradients are compared absolutely
            let rel = (numeric - grad[k]).abs() / (numeric.abs() + grad[k].abs()).max(1e-3);
            assert!(rel < 1e-6, "param {k}: numeric {numeric} vs analytic {}", grad[k]);
        }
    }

    #[test]
    fn zero_network_test_error_is_exactly_one() {
        for prob in [SupervisedProblem::cubic(), SupervisedProblem::gauss_density()] {
            let zero = ParamVector::zeros(prob.param_dim());
            let ts = prob.test_set(256, &mut ChaCha8Rng::seed_from_u64(5));
            assert_eq!(prob.test_error(&zero, &ts), 1.0);
        }
    }

    #[test]
    fn test_set_truth_is_noise_free() {
        let prob = SupervisedProblem::gauss_density();
        let ts = prob.test_set(32, &mut ChaCha8Rng::seed_from_u64(6));
        match ts {
            TestSet::Points { inputs, truth } => {
                for r in 0..inputs.rows() {
                    assert_eq!(truth[r], SupervisedTarget::GaussDensity.value(inputs.row(r)));
                }
            }
            TestSet::Quadrature => panic!("expected sampled points"),
        }
    }

    #[test]
    #[should_panic(expected = "input width must match")]
    fn mismatched_network_width_is_rejected() {
        SupervisedProblem::with_net(
            SupervisedTarget::Cubic,
            MlpSpec::new(vec![5, 8, 1], Activation::Relu),
        );
    }
}
