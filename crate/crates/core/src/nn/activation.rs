//! ReLU and the exact erf-based GELU with their derivatives.

/// Hidden-layer activation function. The output layer is always affine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Gelu,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => relu(x),
            Activation::Gelu => gelu(x),
        }
    }

    /// Derivative at the pre-activation value.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => relu_prime(x),
            Activation::Gelu => gelu_prime(x),
        }
    }
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Subgradient convention at the kink: slope 0 at x = 0.
pub fn relu_prime(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// x * Phi(x) with Phi the standard normal CDF. This is the exact erf form,
/// not the tanh fit, so derivative checks have an unambiguous ground truth.
pub fn gelu(x: f64) -> f64 {
    x * normal_cdf(x)
}

/// d/dx [x * Phi(x)] = Phi(x) + x * phi(x).
pub fn gelu_prime(x: f64) -> f64 {
    normal_cdf(x) + x * normal_pdf(x)
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x * std::f64::consts::FRAC_1_SQRT_2))
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
