//! Fully connected networks over a flat parameter vector.
//!
//! A network is described by an [`MlpSpec`] (layer widths plus hidden
//! activation) and a [`ParamVector`] laid out layer by layer, each layer
//! storing its row-major weight matrix followed by its bias vector. Keeping
//! the parameters flat lets the optimizer treat the whole network as one
//! vector while [`forward`]/[`backward`] reinterpret slices in place.

pub mod activation;

pub use activation::Activation;

use crate::params::ParamVector;
use rand::Rng;

/// Row-major dense matrix used for batches and per-layer intermediates.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length must be rows * cols");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Architecture of a fully connected network: the sequence of layer widths
/// (input first, output last) and the hidden activation. The output layer is
/// affine. Parameter layout is fixed by [`MlpSpec::weight_range`] and
/// [`MlpSpec::bias_range`].
#[derive(Clone, Debug, PartialEq)]
pub struct MlpSpec {
    layer_dims: Vec<usize>,
    activation: Activation,
}

impl MlpSpec {
    pub fn new(layer_dims: Vec<usize>, activation: Activation) -> Self {
        assert!(layer_dims.len() >= 2, "need at least an input and an output width");
        assert!(layer_dims.iter().all(|&d| d >= 1), "layer widths must be positive");
        MlpSpec { layer_dims, activation }
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    /// Number of affine layers (one less than the number of widths).
    pub fn num_layers(&self) -> usize {
        self.layer_dims.len() - 1
    }

    /// Total length of the flat parameter vector.
    pub fn param_count(&self) -> usize {
        (0..self.num_layers())
            .map(|l| (self.layer_dims[l] + 1) * self.layer_dims[l + 1])
            .sum()
    }

    /// Slice of the flat vector holding layer `l`'s weights, row-major with
    /// one row per output unit.
    pub fn weight_range(&self, l: usize) -> std::ops::Range<usize> {
        let start = self.layer_offset(l);
        start..start + self.layer_dims[l] * self.layer_dims[l + 1]
    }

    /// Slice of the flat vector holding layer `l`'s biases, directly after
    /// its weights.
    pub fn bias_range(&self, l: usize) -> std::ops::Range<usize> {
        let wr = self.weight_range(l);
        wr.end..wr.end + self.layer_dims[l + 1]
    }

    fn layer_offset(&self, l: usize) -> usize {
        assert!(l < self.num_layers(), "layer index out of range");
        (0..l).map(|k| (self.layer_dims[k] + 1) * self.layer_dims[k + 1]).sum()
    }
}

/// Per-layer inputs and pre-activations cached by [`forward`] for the
/// backward pass.
pub struct ForwardTape {
    inputs: Vec<Matrix>,
    preacts: Vec<Matrix>,
}

/// Glorot-uniform weights, zero biases. Weights are drawn layer by layer in
/// row-major order so the stream of RNG draws is part of the layout contract.
pub fn init_params<R: Rng>(spec: &MlpSpec, rng: &mut R) -> ParamVector {
    let mut params = ParamVector::zeros(spec.param_count());
    for l in 0..spec.num_layers() {
        let fan_in = spec.layer_dims[l] as f64;
        let fan_out = spec.layer_dims[l + 1] as f64;
        let bound = (6.0 / (fan_in + fan_out)).sqrt();
        for w in &mut params[spec.weight_range(l)] {
            *w = rng.gen_range(-bound..=bound);
        }
    }
    params
}

/// Batched forward pass. `batch` has one sample per row; returns the output
/// batch together with the tape needed by [`backward`].
pub fn forward(spec: &MlpSpec, params: &ParamVector, batch: &Matrix) -> (Matrix, ForwardTape) {
    assert_eq!(batch.cols(), spec.input_dim(), "batch width must match the input width");
    assert_eq!(params.len(), spec.param_count(), "parameter count does not match the spec");
    let k = spec.num_layers();
    let rows = batch.rows();
    let mut inputs = Vec::with_capacity(k);
    let mut preacts = Vec::with_capacity(k - 1);
    let mut a = batch.clone();
    for l in 0..k {
        let z = affine_layer(spec, params, l, &a, rows);
        inputs.push(a);
        if l + 1 < k {
            let mut act = z.clone();
            for x in act.data_mut() {
                *x = spec.activation.apply(*x);
            }
            preacts.push(z);
            a = act;
        } else {
            a = z;
        }
    }
    (a, ForwardTape { inputs, preacts })
}

/// Forward pass without the tape, for evaluation.
pub fn predict(spec: &MlpSpec, params: &ParamVector, batch: &Matrix) -> Matrix {
    assert_eq!(batch.cols(), spec.input_dim(), "batch width must match the input width");
    assert_eq!(params.len(), spec.param_count(), "parameter count does not match the spec");
    let k = spec.num_layers();
    let rows = batch.rows();
    let mut a = batch.clone();
    for l in 0..k {
        let mut z = affine_layer(spec, params, l, &a, rows);
        if l + 1 < k {
            for x in z.data_mut() {
                *x = spec.activation.apply(*x);
            }
        }
        a = z;
    }
    a
}

/// Backward pass. `output_grad` holds the loss gradient with respect to the
/// network output, one row per sample; the result is the gradient with
/// respect to the flat parameter vector, summed over the batch. The caller
/// owns any 1/batch scaling.
pub fn backward(
    spec: &MlpSpec,
    params: &ParamVector,
    tape: ForwardTape,
    output_grad: &Matrix,
) -> ParamVector {
    let k = spec.num_layers();
    assert_eq!(tape.inputs.len(), k, "tape does not match the network shape");
    let rows = tape.inputs[0].rows();
    assert_eq!(output_grad.rows(), rows, "output gradient must have one row per sample");
    assert_eq!(output_grad.cols(), spec.output_dim(), "output gradient width must match");

    let mut grad = ParamVector::zeros(spec.param_count());
    let mut delta = output_grad.clone();
    for l in (0..k).rev() {
        let din = spec.layer_dims[l];
        let dout = spec.layer_dims[l + 1];
        let wr = spec.weight_range(l);
        let br = spec.bias_range(l);
        let a = &tape.inputs[l];
        {
            let seg = &mut grad[wr.start..br.end];
            let (gw, gb) = seg.split_at_mut(din * dout);
            for r in 0..rows {
                let dr = delta.row(r);
                let ar = a.row(r);
                for o in 0..dout {
                    let d = dr[o];
                    let grow = &mut gw[o * din..(o + 1) * din];
                    for i in 0..din {
                        grow[i] += d * ar[i];
                    }
                    gb[o] += d;
                }
            }
        }
        if l > 0 {
            let w = &params[wr];
            let z = &tape.preacts[l - 1];
            let mut dprev = Matrix::zeros(rows, din);
            for r in 0..rows {
                let dr = delta.row(r);
                let pr = dprev.row_mut(r);
                for o in 0..dout {
                    let d = dr[o];
                    let wrow = &w[o * din..(o + 1) * din];
                    for i in 0..din {
                        pr[i] += d * wrow[i];
                    }
                }
                let zr = z.row(r);
                for i in 0..din {
                    pr[i] *= spec.activation.derivative(zr[i]);
                }
            }
            delta = dprev;
        }
    }
    grad
}

fn affine_layer(spec: &MlpSpec, params: &ParamVector, l: usize, a: &Matrix, rows: usize) -> Matrix {
    let din = spec.layer_dims[l];
    let dout = spec.layer_dims[l + 1];
    let w = &params[spec.weight_range(l)];
    let b = &params[spec.bias_range(l)];
    let mut z = Matrix::zeros(rows, dout);
    for r in 0..rows {
        let ar = a.row(r);
        let zr = z.row_mut(r);
        for (o, zo) in zr.iter_mut().enumerate() {
            *zo = b[o] + dot(&w[o * din..(o + 1) * din], ar);
        }
    }
    z
}

// Four accumulators break the serial add dependence so the hot loop
// pipelines; the summation order is still fixed, so results are
// deterministic run to run.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let tail = n % 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    let mut i = 0;
    while i + 4 <= n {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
        i += 4;
    }
    let mut s = (s0 + s1) + (s2 + s3);
    for k in n - tail..n {
        s += a[k] * b[k];
    }
    s
}
