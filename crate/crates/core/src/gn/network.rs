//! One graph-network block with a softmax classification head.
//!
//! Updates run edge → node → global:
//!
//! ```text
//! e'_k = φe(e_k, v_rk, v_sk, u)        ē'_i = mean{ e'_k : r_k = i }
//! v'_i = φv(ē'_i, v_i, u)              ē'   = mean{ e'_k },  v̄' = mean{ v'_i }
//! u'   = φu(ē', v̄', u)                 p    = softmax(W u' + b)
//! ```
//!
//! Empty means are zero vectors, so graphs without edges are valid input.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dense::{Dense, Mlp, MlpTrace};
use crate::error::{Error, Result};
use crate::sample::LearningSample;

pub const CLASSES: usize = 2;
pub const DEFAULT_HIDDEN: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnShape {
    pub node_dim: usize,
    pub edge_dim: usize,
    pub global_dim: usize,
    pub hidden: usize,
}

impl GnShape {
    pub fn new(node_dim: usize, edge_dim: usize, global_dim: usize) -> Self {
        GnShape {
            node_dim,
            edge_dim,
            global_dim,
            hidden: DEFAULT_HIDDEN,
        }
    }

    /// Shape matching the feature widths of `sample`.
    pub fn for_sample(sample: &LearningSample) -> Result<Self> {
        let node_dim = sample
            .node_dim()
            .ok_or_else(|| Error::InvalidInput("sample has no nodes".into()))?;
        let edge_dim = match sample.edge_dim() {
            Some(d) => d,
            None => {
                return Err(Error::InvalidInput(
                    "cannot infer edge width from a sample without edges".into(),
                ))
            }
        };
        Ok(GnShape::new(node_dim, edge_dim, sample.global.len()))
    }

    fn edge_input(&self) -> usize {
        self.edge_dim + 2 * self.node_dim + self.global_dim
    }

    // Column offsets of the edge MLP's concatenated input (e, v_r, v_s, u).
    fn receiver_offset(&self) -> usize {
        self.edge_dim
    }

    fn sender_offset(&self) -> usize {
        self.edge_dim + self.node_dim
    }

    fn global_offset(&self) -> usize {
        self.edge_dim + 2 * self.node_dim
    }
}

/// Weights of the three update MLPs and the classification head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnParameters {
    pub shape: GnShape,
    pub seed: u64,
    pub edge_mlp: Mlp,
    pub node_mlp: Mlp,
    pub global_mlp: Mlp,
    pub head: Dense,
}

impl GnParameters {
    /// Seeded He-uniform initialization; the head uses a LeCun-uniform bound.
    pub fn init(shape: GnShape, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = shape.hidden;
        let edge_mlp = Mlp::new(shape.edge_input(), &[h, h], &mut rng);
        let node_mlp = Mlp::new(h + shape.node_dim + shape.global_dim, &[h, h], &mut rng);
        let global_mlp = Mlp::new(2 * h + shape.global_dim, &[h, h], &mut rng);
        let head = Dense::uniform(h, CLASSES, (1.0 / h as f64).sqrt(), &mut rng);
        GnParameters {
            shape,
            seed,
            edge_mlp,
            node_mlp,
            global_mlp,
            head,
        }
    }

    pub fn zeros_like(&self) -> Self {
        GnParameters {
            shape: self.shape,
            seed: self.seed,
            edge_mlp: self.edge_mlp.zeros_like(),
            node_mlp: self.node_mlp.zeros_like(),
            global_mlp: self.global_mlp.zeros_like(),
            head: Dense::zeros(self.head.input, self.head.output),
        }
    }

    /// Every dense layer with a stable name, in a fixed order.
    pub fn layers(&self) -> Vec<(String, &Dense)> {
        let mut out = Vec::new();
        for (prefix, mlp) in [
            ("edge", &self.edge_mlp),
            ("node", &self.node_mlp),
            ("global", &self.global_mlp),
        ] {
            for (i, l) in mlp.layers.iter().enumerate() {
                out.push((format!("{prefix}.{i}"), l));
            }
        }
        out.push(("head".to_string(), &self.head));
        out
    }

    pub fn layers_mut(&mut self) -> Vec<&mut Dense> {
        let mut out: Vec<&mut Dense> = Vec::new();
        out.extend(self.edge_mlp.layers.iter_mut());
        out.extend(self.node_mlp.layers.iter_mut());
        out.extend(self.global_mlp.layers.iter_mut());
        out.push(&mut self.head);
        out
    }

    /// All weights then biases of each layer, layer by layer.
    pub fn flat_params(&self) -> Vec<f64> {
        self.layers()
            .into_iter()
            .flat_map(|(_, l)| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers().iter().map(|(_, l)| l.param_count()).sum()
    }

    /// Mutable access to parameter `index` in [`flat_params`](Self::flat_params) order.
    pub fn param_mut(&mut self, mut index: usize) -> &mut f64 {
        for layer in self.layers_mut() {
            if index < layer.weights.len() {
                return &mut layer.weights[index];
            }
            index -= layer.weights.len();
            if index < layer.bias.len() {
                return &mut layer.bias[index];
            }
            index -= layer.bias.len();
        }
        panic!("parameter index out of range");
    }

    /// `self += scale * other`, parameter-wise.
    pub fn add_scaled(&mut self, other: &GnParameters, scale: f64) {
        let others: Vec<&Dense> = other.layers().into_iter().map(|(_, l)| l).collect();
        for (mine, theirs) in self.layers_mut().into_iter().zip(others) {
            mine.weights
                .iter_mut()
                .zip(&theirs.weights)
                .for_each(|(w, g)| *w += scale * g);
            mine.bias
                .iter_mut()
                .zip(&theirs.bias)
                .for_each(|(w, g)| *w += scale * g);
        }
    }

    pub fn norm(&self) -> f64 {
        self.flat_params().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.layers()
            .iter()
            .all(|(_, l)| l.weights.iter().chain(&l.bias).all(|x| x.is_finite()))
    }

    fn check_sample(&self, sample: &LearningSample) -> Result<()> {
        if sample.nodes.is_empty() {
            return Err(Error::InvalidInput(format!(
                "sample of debate {} has no nodes",
                sample.debate_id
            )));
        }
        let mismatch = |expected, found, what: &str| Error::DimensionMismatch {
            expected,
            found,
            context: format!("{what} features of a sample of {}", sample.debate_id),
        };
        if sample.global.len() != self.shape.global_dim {
            return Err(mismatch(
                self.shape.global_dim,
                sample.global.len(),
                "global",
            ));
        }
        for n in &sample.nodes {
            if n.features.len() != self.shape.node_dim {
                return Err(mismatch(self.shape.node_dim, n.features.len(), "node"));
            }
        }
        for e in &sample.edges {
            if e.features.len() != self.shape.edge_dim {
                return Err(mismatch(self.shape.edge_dim, e.features.len(), "edge"));
            }
            if e.sender >= sample.nodes.len() || e.receiver >= sample.nodes.len() {
                return Err(Error::Validation(format!(
                    "edge {}->{} out of range",
                    e.sender, e.receiver
                )));
            }
        }
        Ok(())
    }
}

/// Everything the backward pass needs from one forward evaluation.
#[derive(Debug, Clone)]
pub struct GnTrace {
    edges: Vec<MlpTrace>,
    in_degree: Vec<usize>,
    nodes: Vec<MlpTrace>,
    global: MlpTrace,
    pub logits: [f64; CLASSES],
    pub probs: [f64; CLASSES],
}

impl GnTrace {
    /// Sign pattern of every ReLU pre-activation; equal patterns mean the
    /// network is locally a single smooth function of its weights.
    pub fn relu_pattern(&self) -> Vec<bool> {
        self.edges
            .iter()
            .chain(&self.nodes)
            .chain(std::iter::once(&self.global))
            .flat_map(|t| t.pre.iter().flatten().map(|&z| z > 0.0))
            .collect()
    }
}

fn mean_into(acc: &mut [f64], count: usize) {
    if count > 0 {
        acc.iter_mut().for_each(|a| *a /= count as f64);
    }
}

fn softmax(logits: [f64; CLASSES]) -> [f64; CLASSES] {
    let max = logits[0].max(logits[1]);
    let e = [(logits[0] - max).exp(), (logits[1] - max).exp()];
    let z = e[0] + e[1];
    [e[0] / z, e[1] / z]
}

pub fn gn_forward_trace(params: &GnParameters, sample: &LearningSample) -> Result<GnTrace> {
    params.check_sample(sample)?;
    let shape = params.shape;
    let h = shape.hidden;
    let n = sample.nodes.len();
    let u = &sample.global;

    // φe, first layer split by input block so node projections are shared.
    let first = &params.edge_mlp.layers[0];
    let project = |offset: usize| -> Vec<Vec<f64>> {
        sample
            .nodes
            .iter()
            .map(|node| {
                let mut z = vec![0.0; h];
                first.forward_block(&node.features, offset, &mut z);
                z
            })
            .collect()
    };
    let as_receiver = project(shape.receiver_offset());
    let as_sender = project(shape.sender_offset());
    let mut shared = first.bias.clone();
    first.forward_block(u, shape.global_offset(), &mut shared);

    let mut edge_sum = vec![0.0; h];
    let mut per_node = vec![vec![0.0; h]; n];
    let mut in_degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(sample.edges.len());
    for e in &sample.edges {
        let mut z = shared.clone();
        first.forward_block(&e.features, 0, &mut z);
        z.iter_mut()
            .zip(&as_receiver[e.receiver])
            .zip(&as_sender[e.sender])
            .for_each(|((z, r), s)| *z += r + s);
        let trace = params.edge_mlp.trace_from(Vec::new(), Some(z));
        edge_sum
            .iter_mut()
            .zip(&trace.output)
            .for_each(|(a, x)| *a += x);
        per_node[e.receiver]
            .iter_mut()
            .zip(&trace.output)
            .for_each(|(a, x)| *a += x);
        in_degree[e.receiver] += 1;
        edges.push(trace);
    }
    mean_into(&mut edge_sum, edges.len());
    for (acc, &deg) in per_node.iter_mut().zip(&in_degree) {
        mean_into(acc, deg);
    }

    // φv
    let mut node_sum = vec![0.0; h];
    let mut nodes = Vec::with_capacity(n);
    for (agg, node) in per_node.into_iter().zip(&sample.nodes) {
        let mut input = agg;
        input.extend_from_slice(&node.features);
        input.extend_from_slice(u);
        let trace = params.node_mlp.trace(input);
        node_sum
            .iter_mut()
            .zip(&trace.output)
            .for_each(|(a, x)| *a += x);
        nodes.push(trace);
    }
    mean_into(&mut node_sum, n);

    // φu and head
    let mut input = edge_sum;
    input.extend_from_slice(&node_sum);
    input.extend_from_slice(u);
    let global = params.global_mlp.trace(input);
    let mut logits = [0.0; CLASSES];
    params.head.forward(&global.output, &mut logits);
    if logits.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!(
            "logits {logits:?} for a sample of {}",
            sample.debate_id
        )));
    }
    let probs = softmax(logits);
    Ok(GnTrace {
        edges,
        in_degree,
        nodes,
        global,
        logits,
        probs,
    })
}

/// Class probabilities `(p_F, p_A)`.
pub fn gn_forward(params: &GnParameters, sample: &LearningSample) -> Result<[f64; CLASSES]> {
    Ok(gn_forward_trace(params, sample)?.probs)
}

/// Cross-entropy `-ln p[class]`, with `p` clamped below at 1e-12.
pub fn gn_loss(probs: [f64; CLASSES], class: usize) -> f64 {
    -probs[class].max(1e-12).ln()
}

/// Adds the loss gradient for one sample into `grad`; returns the loss.
pub fn accumulate_gradient(
    params: &GnParameters,
    sample: &LearningSample,
    class: usize,
    grad: &mut GnParameters,
) -> Result<f64> {
    let trace = gn_forward_trace(params, sample)?;
    let shape = params.shape;
    let h = shape.hidden;
    let n = sample.nodes.len();
    let m = sample.edges.len();

    let mut d_logits = trace.probs;
    d_logits[class] -= 1.0;
    params
        .head
        .accumulate(&mut grad.head, &trace.global.output, &d_logits);
    let mut d_global_out = vec![0.0; h];
    params.head.backward_input(&d_logits, &mut d_global_out);
    let d_global_in =
        params
            .global_mlp
            .backward(&trace.global, &d_global_out, &mut grad.global_mlp);
    let d_edge_mean = &d_global_in[..h];
    let d_node_mean = &d_global_in[h..2 * h];

    let d_node_out: Vec<f64> = d_node_mean.iter().map(|d| d / n as f64).collect();
    let mut d_per_node = Vec::with_capacity(n);
    for t in &trace.nodes {
        let dx = params.node_mlp.backward(t, &d_node_out, &mut grad.node_mlp);
        d_per_node.push(dx[..h].to_vec());
    }

    if m > 0 {
        let first = &params.edge_mlp.layers[0];
        let mut d_receiver = vec![vec![0.0; h]; n];
        let mut d_sender = vec![vec![0.0; h]; n];
        let mut d_shared = vec![0.0; h];
        for (e, t) in sample.edges.iter().zip(&trace.edges) {
            let deg = trace.in_degree[e.receiver] as f64;
            let d_out: Vec<f64> = d_edge_mean
                .iter()
                .zip(&d_per_node[e.receiver])
                .map(|(a, b)| a / m as f64 + b / deg)
                .collect();
            let dz = params
                .edge_mlp
                .backward_to_first_pre(t, &d_out, &mut grad.edge_mlp);
            first.accumulate_block(&mut grad.edge_mlp.layers[0], &e.features, 0, &dz);
            for (acc, d) in [
                (&mut d_receiver[e.receiver], &dz),
                (&mut d_sender[e.sender], &dz),
                (&mut d_shared, &dz),
            ] {
                acc.iter_mut().zip(d.iter()).for_each(|(a, x)| *a += x);
            }
        }
        let g0 = &mut grad.edge_mlp.layers[0];
        for (i, node) in sample.nodes.iter().enumerate() {
            first.accumulate_block(g0, &node.features, shape.receiver_offset(), &d_receiver[i]);
            first.accumulate_block(g0, &node.features, shape.sender_offset(), &d_sender[i]);
        }
        first.accumulate_block(g0, &sample.global, shape.global_offset(), &d_shared);
        g0.bias.iter_mut().zip(&d_shared).for_each(|(b, d)| *b += d);
    }

    Ok(gn_loss(trace.probs, class))
}

/// Loss and its exact gradient with respect to every parameter.
pub fn gn_gradient(
    params: &GnParameters,
    sample: &LearningSample,
    class: usize,
) -> Result<(f64, GnParameters)> {
    let mut grad = params.zeros_like();
    let loss = accumulate_gradient(params, sample, class, &mut grad)?;
    Ok((loss, grad))
}

/// Sum of per-sample gradients over a batch; returns the summed loss too.
pub fn batch_gradient(
    params: &GnParameters,
    samples: &[&LearningSample],
) -> Result<(f64, GnParameters)> {
    let mut grad = params.zeros_like();
    let mut loss = 0.0;
    for s in samples {
        loss += accumulate_gradient(params, s, s.class(), &mut grad)?;
    }
    Ok((loss, grad))
}
