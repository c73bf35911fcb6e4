//! Adam and SGD with post-hoc iterate averaging (sliding-window, grouped,
//! exponential, running-mean), a minimal dense-network engine with
//! hand-derived backprop, stochastic benchmark problems with analytic
//! ground truth, and a deterministic CSV/SVG experiment harness.

pub mod harness;
pub mod nn;
pub mod optim;
pub mod params;
pub mod problems;
pub mod rng;

pub use params::ParamVector;
