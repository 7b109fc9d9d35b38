//! Fully-connected layers with ReLU activations.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Affine map `z = W x + b` with `W` stored row-major (`output × input`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub input: usize,
    pub output: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(input: usize, output: usize) -> Self {
        Dense {
            input,
            output,
            weights: vec![0.0; input * output],
            bias: vec![0.0; output],
        }
    }

    /// Uniform weights in `±bound`, zero bias.
    pub fn uniform<R: Rng>(input: usize, output: usize, bound: f64, rng: &mut R) -> Self {
        let weights = (0..input * output)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        Dense {
            input,
            output,
            weights,
            bias: vec![0.0; output],
        }
    }

    /// He-style uniform initialization, `bound = sqrt(6 / fan_in)`.
    pub fn he_uniform<R: Rng>(input: usize, output: usize, rng: &mut R) -> Self {
        Self::uniform(input, output, (6.0 / input.max(1) as f64).sqrt(), rng)
    }

    fn row(&self, o: usize) -> &[f64] {
        &self.weights[o * self.input..(o + 1) * self.input]
    }

    /// `out = W x + b`.
    pub fn forward(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.input);
        for (o, z) in out.iter_mut().enumerate() {
            *z = self.bias[o] + dot(self.row(o), x);
        }
    }

    /// `out += W[:, offset..offset + x.len()] x`, the contribution of one input block.
    pub fn forward_block(&self, x: &[f64], offset: usize, out: &mut [f64]) {
        for (o, z) in out.iter_mut().enumerate() {
            *z += dot(&self.row(o)[offset..offset + x.len()], x);
        }
    }

    /// Adds `dz ⊗ x` to the weight gradient and `dz` to the bias gradient.
    pub fn accumulate(&self, grad: &mut Dense, x: &[f64], dz: &[f64]) {
        self.accumulate_block(grad, x, 0, dz);
        grad.bias.iter_mut().zip(dz).for_each(|(g, d)| *g += d);
    }

    /// Adds `dz ⊗ x` to the weight-gradient columns of one input block.
    pub fn accumulate_block(&self, grad: &mut Dense, x: &[f64], offset: usize, dz: &[f64]) {
        for (o, &d) in dz.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let row = &mut grad.weights[o * self.input + offset..o * self.input + offset + x.len()];
            row.iter_mut().zip(x).for_each(|(g, xi)| *g += d * xi);
        }
    }

    /// `dx = Wᵀ dz`.
    pub fn backward_input(&self, dz: &[f64], dx: &mut [f64]) {
        dx.iter_mut().for_each(|v| *v = 0.0);
        for (o, &d) in dz.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            dx.iter_mut()
                .zip(self.row(o))
                .for_each(|(v, w)| *v += d * w);
        }
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn relu_in_place(v: &mut [f64]) {
    v.iter_mut().for_each(|x| *x = x.max(0.0));
}

/// Zeroes `grad` wherever the pre-activation was not positive.
pub(crate) fn relu_backward(pre: &[f64], grad: &mut [f64]) {
    grad.iter_mut().zip(pre).for_each(|(g, &z)| {
        if z <= 0.0 {
            *g = 0.0
        }
    });
}

/// Stack of dense layers, each followed by ReLU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Intermediate values of one MLP evaluation.
#[derive(Debug, Clone)]
pub struct MlpTrace {
    /// Input to each layer.
    pub inputs: Vec<Vec<f64>>,
    /// Pre-activation of each layer.
    pub pre: Vec<Vec<f64>>,
    pub output: Vec<f64>,
}

impl Mlp {
    pub fn new<R: Rng>(input: usize, widths: &[usize], rng: &mut R) -> Self {
        let mut layers = Vec::with_capacity(widths.len());
        let mut fan_in = input;
        for &w in widths {
            layers.push(Dense::he_uniform(fan_in, w, rng));
            fan_in = w;
        }
        Mlp { layers }
    }

    pub fn zeros_like(&self) -> Self {
        Mlp {
            layers: self
                .layers
                .iter()
                .map(|l| Dense::zeros(l.input, l.output))
                .collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.output)
    }

    /// Runs the stack. When `first_pre` is given it replaces the first
    /// layer's pre-activation (computed by the caller from input blocks).
    pub fn trace_from(&self, input: Vec<f64>, first_pre: Option<Vec<f64>>) -> MlpTrace {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut x = input;
        for (i, layer) in self.layers.iter().enumerate() {
            let z = match (i, &first_pre) {
                (0, Some(z)) => z.clone(),
                _ => {
                    let mut z = vec![0.0; layer.output];
                    layer.forward(&x, &mut z);
                    z
                }
            };
            let mut h = z.clone();
            relu_in_place(&mut h);
            inputs.push(x);
            pre.push(z);
            x = h;
        }
        MlpTrace {
            inputs,
            pre,
            output: x,
        }
    }

    pub fn trace(&self, input: Vec<f64>) -> MlpTrace {
        self.trace_from(input, None)
    }

    /// Backpropagates `d_out` through all layers but the first's weight
    /// gradient; returns the gradient w.r.t. the first layer's pre-activation.
    pub fn backward_to_first_pre(
        &self,
        trace: &MlpTrace,
        d_out: &[f64],
        grad: &mut Mlp,
    ) -> Vec<f64> {
        let mut d = d_out.to_vec();
        for i in (0..self.layers.len()).rev() {
            relu_backward(&trace.pre[i], &mut d);
            if i == 0 {
                break;
            }
            self.layers[i].accumulate(&mut grad.layers[i], &trace.inputs[i], &d);
            let mut dx = vec![0.0; self.layers[i].input];
            self.layers[i].backward_input(&d, &mut dx);
            d = dx;
        }
        d
    }

    /// Full backward pass; returns the gradient w.r.t. the MLP input.
    pub fn backward(&self, trace: &MlpTrace, d_out: &[f64], grad: &mut Mlp) -> Vec<f64> {
        let dz = self.backward_to_first_pre(trace, d_out, grad);
        self.layers[0].accumulate(&mut grad.layers[0], &trace.inputs[0], &dz);
        let mut dx = vec![0.0; self.layers[0].input];
        self.layers[0].backward_input(&dz, &mut dx);
        dx
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }
}
