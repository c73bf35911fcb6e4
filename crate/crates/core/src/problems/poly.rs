//! Degree-25 polynomial regression of sin(pi x) on [-1, 1].

use super::quadrature::GaussLegendre;
use super::{standard_normal, StochasticProblem, TestSet};
use crate::params::ParamVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Least-squares regression of noisy sin(pi x) samples onto the raw monomial
/// basis 1, x, ..., x^25. The monomial basis is badly conditioned at this
/// degree, which is exactly the landscape that makes the problem interesting
/// for an adaptive optimizer.
pub struct PolyRegression {
    degree: usize,
    noise_std: f64,
    quad: GaussLegendre,
}

impl PolyRegression {
    pub fn new() -> Self {
        Self::with_noise_std((1.0f64 / 5.0).sqrt())
    }

    /// Same problem with a custom target-noise level (0 disables noise).
    pub fn with_noise_std(noise_std: f64) -> Self {
        assert!(noise_std >= 0.0);
        PolyRegression { degree: 25, noise_std, quad: GaussLegendre::new(256) }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Loss and gradient on an explicit batch: (1/J) sum_j (p(x_j) - y_j)^2
    /// with p the polynomial with coefficient vector `theta`.
    pub fn loss_grad_for_batch(
        &self,
        theta: &ParamVector,
        xs: &[f64],
        ys: &[f64],
    ) -> (f64, ParamVector) {
        assert_eq!(theta.len(), self.degree + 1, "coefficient count must be degree + 1");
        assert_eq!(xs.len(), ys.len(), "one target per input");
        assert!(!xs.is_empty(), "batch must be non-empty");
        let dim = self.degree + 1;
        let j = xs.len() as f64;
        let mut loss = 0.0;
        let mut grad = ParamVector::zeros(dim);
        let mut powers = vec![0.0; dim];
        for (&x, &y) in xs.iter().zip(ys) {
            let mut p = 1.0;
            for slot in powers.iter_mut() {
                *slot = p;
                p *= x;
            }
            let pred: f64 = theta.iter().zip(&powers).map(|(t, pw)| t * pw).sum();
            let r = pred - y;
            loss += r * r;
            for (g, pw) in grad.iter_mut().zip(&powers) {
                *g += 2.0 * r * pw;
            }
        }
        for g in grad.iter_mut() {
            *g /= j;
        }
        (loss / j, grad)
    }

    /// Noise-free L2 distance between the polynomial and sin(pi x) under the
    /// uniform probability measure on [-1, 1], by 256-node Gauss-Legendre:
    /// sqrt( (1/2) * integral of (p(x) - sin(pi x))^2 dx ).
    pub fn l2_distance(&self, theta: &ParamVector) -> f64 {
        assert_eq!(theta.len(), self.degree + 1, "coefficient count must be degree + 1");
        let sq = self.quad.integrate(|x| {
            let mut pred = 0.0;
            let mut p = 1.0;
            for t in theta.iter() {
                pred += t * p;
                p *= x;
            }
            let r = pred - (PI * x).sin();
            r * r
        });
        (0.5 * sq).sqrt()
    }
}

impl Default for PolyRegression {
    fn default() -> Self {
        Self::new()
    }
}

impl StochasticProblem for PolyRegression {
    fn param_dim(&self) -> usize {
        self.degree + 1
    }

    /// All-zero coefficients: the loss is convex, so the start only shifts
    /// the transient, and zero gives every run the same clean origin.
    fn init_params(&self, _rng: &mut ChaCha8Rng) -> ParamVector {
        ParamVector::zeros(self.degree + 1)
    }

    fn sample_loss_grad(
        &self,
        params: &ParamVector,
        batch_size: usize,
        rng: &mut ChaCha8Rng,
    ) -> (f64, ParamVector) {
        let xs: Vec<f64> = (0..batch_size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| (PI * x).sin() + self.noise_std * standard_normal(rng))
            .collect();
        self.loss_grad_for_batch(params, &xs, &ys)
    }

    fn test_set(&self, _n_points: usize, _rng: &mut ChaCha8Rng) -> TestSet {
        TestSet::Quadrature
    }

    fn test_error(&self, params: &ParamVector, test_set: &TestSet) -> f64 {
        match test_set {
            TestSet::Quadrature => self.l2_distance(params),
            TestSet::Points { .. } => panic!("polynomial regression evaluates by quadrature"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    // Degree-25 interpolant of sin(pi x) at the 26 Chebyshev-Gauss nodes,
    // expressed in the monomial basis via the exact integer coefficients of
    // the Chebyshev polynomials. Entirely independent of the quadrature rule.
    fn chebyshev_fit_theta() -> ParamVector {
        let m = 26;
        let mut c = vec![0.0; m];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..m {
                let t = PI * (j as f64 + 0.5) / m as f64;
                s += (PI * t.cos()).sin() * (k as f64 * t).cos();
            }
            *ck = 2.0 * s / m as f64;
        }
        c[0] *= 0.5;
        let mut tcoef: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
        for k in 2..m {
            let mut next = vec![0.0; k + 1];
            for (i, &v) in tcoef[k - 1].iter().enumerate() {
                next[i + 1] += 2.0 * v;
            }
            for (i, &v) in tcoef[k - 2].iter().enumerate() {
                next[i] -= v;
            }
            tcoef.push(next);
        }
        let mut theta = ParamVector::zeros(m);
        for (k, ck) in c.iter().enumerate() {
            for (i, &v) in tcoef[k].iter().enumerate() {
                theta[i] += ck * v;
            }
        }
        theta
    }

    #[test]
    fn zero_coefficients_distance_is_sqrt_half() {
        let prob = PolyRegression::new();
        let zero = ParamVector::zeros(26);
        assert!((prob.l2_distance(&zero) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distance_is_deterministic() {
        let prob = PolyRegression::new();
        let theta: ParamVector = (0..26).map(|k| 0.1 * k as f64).collect();
        assert_eq!(prob.l2_distance(&theta), prob.l2_distance(&theta));
    }

    #[test]
    fn chebyshev_interpolant_distance_is_tiny() {
        let prob = PolyRegression::new();
        let theta = chebyshev_fit_theta();
        let e = prob.l2_distance(&theta);
        assert!(e < 1e-10, "interpolant distance {e}");
    }

    #[test]
    fn mean_loss_at_zero_coefficients_without_noise() {
        // E[sin^2(pi X)] over X ~ U[-1,1] is 1/2.
        let prob = PolyRegression::with_noise_std(0.0);
        let zero = ParamVector::zeros(26);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut total = 0.0;
        let chunks = 10;
        for _ in 0..chunks {
            let (loss, _) = prob.sample_loss_grad(&zero, 100_000, &mut rng);
            total += loss;
        }
        let mean = total / chunks as f64;
        assert!((mean - 0.5).abs() < 0.01, "mc mean {mean}");
    }

    #[test]
    fn mean_loss_at_zero_coefficients_with_noise() {
        // Independent noise of variance 1/5 adds exactly 0.2 to the mean.
        let prob = PolyRegression::new();
        let zero = ParamVector::zeros(26);
        let mut rng = ChaCha8Rng::seed_from_u64(2025);
        let mut total = 0.0;
        let chunks = 10;
        for _ in 0..chunks {
            let (loss, _) = prob.sample_loss_grad(&zero, 100_000, &mut rng);
            total += loss;
        }
        let mean = total / chunks as f64;
        assert!((mean - 0.7).abs() < 0.01, "mc mean {mean}");
    }

    #[test]
    fn single_sample_at_origin_touches_only_the_constant() {
        let prob = PolyRegression::new();
        let mut theta = ParamVector::zeros(26);
        theta[0] = 0.75;
        theta[7] = -3.0;
        let (loss, grad) = prob.loss_grad_for_batch(&theta, &[0.0], &[0.0]);
        assert_eq!(loss, 0.75 * 0.75);
        assert_eq!(grad[0], 2.0 * 0.75);
        assert!(grad[1..].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn grad_matches_central_differences_on_fixed_batch() {
        let prob = PolyRegression::new();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let xs: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (PI * x).sin() + rng.gen_range(-0.5..0.5)).collect();
        let theta: ParamVector = (0..26).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let (_, grad) = prob.loss_grad_for_batch(&theta, &xs, &ys);
        let h = 1e-6;
        for k in 0..26 {
            let mut plus = theta.clone();
            plus[k] += h;
            let mut minus = theta.clone();
            minus[k] -= h;
            let numeric = (prob.loss_grad_for_batch(&plus, &xs, &ys).0
                - prob.loss_grad_for_batch(&minus, &xs, &ys).0)
                / (2.0 * h);
            let rel = (numeric - grad[k]).abs() / (numeric.abs() + grad[k].abs()).max(1e-8);
            assert!(rel < 1e-6, "coefficient {k}: numeric {numeric} vs analytic {}", grad[k]);
        }
    }

    #[test]
    fn batch_loss_is_convex_in_coefficients() {
        let prob = PolyRegression::new();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let xs: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (PI * x).sin()).collect();
        for _ in 0..20 {
            let a: ParamVector = (0..26).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: ParamVector = (0..26).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mid: ParamVector = a.iter().zip(b.iter()).map(|(x, y)| 0.5 * (x + y)).collect();
            let la = prob.loss_grad_for_batch(&a, &xs, &ys).0;
            let lb = prob.loss_grad_for_batch(&b, &xs, &ys).0;
            let lm = prob.loss_grad_for_batch(&mid, &xs, &ys).0;
            assert!(lm <= 0.5 * (la + lb) + 1e-12);
        }
    }

    #[test]
    fn initial_coefficients_are_zero() {
        let prob = PolyRegression::new();
        let init = prob.init_params(&mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(init.len(), 26);
        assert!(init.iter().all(|&t| t == 0.0));
    }
}
