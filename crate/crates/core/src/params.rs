//! Flat parameter vectors shared by the optimizers, the averagers and the
//! network engine.

use std::ops::{Deref, DerefMut};

/// Flat 64-bit parameter vector. Every trainable object in this crate keeps
/// its state in one of these, so optimizers and averagers never need to know
/// about network shapes.
///
/// Derefs to `[f64]`, so indexing, slicing and iteration work directly.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamVector {
    data: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![0.0; dim] }
    }

    pub fn from_vec(data: Vec<f64>) -> Self {
        Self { data }
    }

    /// Overwrites `self` with `other`'s components. Dimensions must agree.
    pub fn copy_from(&mut self, other: &ParamVector) {
        assert_eq!(
            self.data.len(),
            other.data.len(),
            "cannot copy between parameter vectors of different dimension"
        );
        self.data.copy_from_slice(&other.data);
    }

    /// Index of the first non-finite component, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.data.iter().position(|x| !x.is_finite())
    }
}

impl Deref for ParamVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.data
    }
}

impl DerefMut for ParamVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(data: Vec<f64>) -> Self {
        Self { data }
    }
}

impl FromIterator<f64> for ParamVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self { data: iter.into_iter().collect() }
    }
}
