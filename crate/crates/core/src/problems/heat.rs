//! Terminal-value regression for the heat equation u_t = Laplacian(u).
//!
//! The solution at time T with initial condition phi(x) = |x|^2 is the
//! conditional mean of phi(x + sqrt(2T) Z) with Z standard normal, so
//! training a network on samples (xi, phi(xi + sqrt(2T) Z)) with squared
//! loss drives it toward u(T, xi) = |xi|^2 + 2 d T.

use super::{mse_loss_grad, standard_normal, uniform_batch, StochasticProblem, TestSet};
use crate::nn::{self, Activation, MlpSpec};
use crate::params::ParamVector;
use rand_chacha::ChaCha8Rng;

/// Dimension, horizon, and closed-form solution of the heat problem.
#[derive(Clone, Copy, Debug)]
pub struct HeatDkm {
    dim: usize,
    final_time: f64,
}

impl HeatDkm {
    pub fn new() -> Self {
        HeatDkm { dim: 10, final_time: 2.0 }
    }

    pub fn dim(self) -> usize {
        self.dim
    }

    pub fn final_time(self) -> f64 {
        self.final_time
    }

    /// sqrt(2T), the standard deviation of each diffusion coordinate at T.
    pub fn diffusion_scale(self) -> f64 {
        (2.0 * self.final_time).sqrt()
    }

    /// u(t, x) = |x|^2 + 2 d t.
    pub fn solution(self, t: f64, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "input dimension mismatch");
        let sq: f64 = x.iter().map(|&v| v * v).sum();
        sq + 2.0 * self.dim as f64 * t
    }

    /// u(T, x), the regression ground truth.
    pub fn exact_solution(self, x: &[f64]) -> f64 {
        self.solution(self.final_time, x)
    }

    /// One training target |xi + sqrt(2T) z|^2 for a spatial point xi and a
    /// standard normal draw z.
    pub fn sample_target(self, xi: &[f64], z: &[f64]) -> f64 {
        assert_eq!(xi.len(), self.dim, "input dimension mismatch");
        assert_eq!(z.len(), self.dim, "noise dimension mismatch");
        let s = self.diffusion_scale();
        xi.iter().zip(z).map(|(&x, &n)| (x + s * n) * (x + s * n)).sum()
    }
}

impl Default for HeatDkm {
    fn default() -> Self {
        Self::new()
    }
}

/// A network trained on diffusion samples to approximate u(T, .) on [-1,1]^d.
pub struct HeatProblem {
    dynamics: HeatDkm,
    net: MlpSpec,
}

impl HeatProblem {
    pub fn new() -> Self {
        Self::with_net(HeatDkm::new(), MlpSpec::new(vec![10, 50, 100, 50, 1], Activation::Gelu))
    }

    /// Same dynamics with a custom (typically reduced) architecture.
    pub fn with_net(dynamics: HeatDkm, net: MlpSpec) -> Self {
        assert_eq!(net.input_dim(), dynamics.dim(), "network input width must match");
        assert_eq!(net.output_dim(), 1, "regression network must have one output");
        HeatProblem { dynamics, net }
    }

    pub fn dynamics(&self) -> HeatDkm {
        self.dynamics
    }

    pub fn net(&self) -> &MlpSpec {
        &self.net
    }
}

impl Default for HeatProblem {
    fn default() -> Self {
        Self::new()
    }
}

impl StochasticProblem for HeatProblem {
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
        let d = self.dynamics.dim();
        let inputs = uniform_batch(rng, batch_size, d, 1.0);
        let mut z = vec![0.0; d];
        let targets: Vec<f64> = (0..batch_size)
            .map(|r| {
                for slot in z.iter_mut() {
                    *slot = standard_normal(rng);
                }
                self.dynamics.sample_target(inputs.row(r), &z)
            })
            .collect();
        mse_loss_grad(&self.net, params, &inputs, &targets)
    }

    fn test_set(&self, n_points: usize, rng: &mut ChaCha8Rng) -> TestSet {
        let d = self.dynamics.dim();
        let inputs = uniform_batch(rng, n_points, d, 1.0);
        let truth = (0..n_points).map(|r| self.dynamics.exact_solution(inputs.row(r))).collect();
        TestSet::Points { inputs, truth }
    }

    fn test_error(&self, params: &ParamVector, test_set: &TestSet) -> f64 {
        match test_set {
            TestSet::Points { inputs, truth } => {
                let out = nn::predict(&self.net, params, inputs);
                super::relative_l2(out.data(), truth)
            }
            TestSet::Quadrature => panic!("heat problem evaluates on a sampled test set"),
        }
    }
}
