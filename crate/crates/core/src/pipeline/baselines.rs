//! Debate-level splits and the non-GN baselines.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::EmbeddingTable;
use crate::encoder::{encode_af, DebateFramework};
use crate::error::{Error, Result};
use crate::gn::{argmax, predict_samples, train, GnParameters, GnShape, TrainConfig};
use crate::model::{Debate, Stance};
use crate::sample::{graph_sample, LearningSample};
use crate::semantics::{solve_debate, Extension, Semantics, SolverLimits};

/// Debate indices of a holdout split, each side sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Random partition of `n` debates with `round(ratio * n)` on the train
/// side, kept within `1..n` so neither side is empty.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> Result<Split> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 debates to split, got {n}"
        )));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!(
            "split ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let train_size = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = order[..train_size].to_vec();
    let mut test = order[train_size..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

pub fn split_debates(
    debates: &[Debate],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<Debate>, Vec<Debate>)> {
    let split = split_indices(debates.len(), ratio, seed)?;
    let pick = |idx: &[usize]| idx.iter().map(|&i| debates[i].clone()).collect();
    Ok((pick(&split.train), pick(&split.test)))
}

/// One fair coin flip per debate.
pub fn baseline_random(n_debates: usize, seed: u64) -> Vec<Stance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_debates)
        .map(|_| {
            if rng.random_bool(0.5) {
                Stance::Favour
            } else {
                Stance::Against
            }
        })
        .collect()
}

/// Per-stance totals of accepted arguments across all extensions.
pub fn stance_totals(df: &DebateFramework, extensions: &[Extension]) -> [usize; 2] {
    let mut totals = [0, 0];
    for ext in extensions {
        for &a in &ext.arguments {
            totals[df.arguments[a].stance.class_index()] += 1;
        }
    }
    totals
}

/// The stance with more accepted arguments; ties go to Favour.
pub fn atb_predict(df: &DebateFramework, extensions: &[Extension]) -> Stance {
    let [favour, against] = stance_totals(df, extensions);
    if against > favour {
        Stance::Against
    } else {
        Stance::Favour
    }
}

pub fn baseline_atb(
    debates: &[Debate],
    semantics: Semantics,
    limits: SolverLimits,
) -> Result<Vec<Stance>> {
    debates
        .iter()
        .map(|d| {
            let df = encode_af(d)?;
            let exts = solve_debate(&df, semantics, limits)?;
            Ok(atb_predict(&df, &exts))
        })
        .collect()
}

/// Graph-network baseline on the raw argument graphs, one sample per debate.
pub fn baseline_gnb(
    train_debates: &[Debate],
    test_debates: &[Debate],
    emb: &EmbeddingTable,
    cfg: &TrainConfig,
    hidden: usize,
    global_dim: usize,
    init_seed: u64,
) -> Result<Vec<Stance>> {
    let build = |ds: &[Debate]| -> Result<Vec<LearningSample>> {
        ds.iter()
            .map(|d| graph_sample(d, emb, global_dim))
            .collect()
    };
    let train_samples = build(train_debates)?;
    let test_samples = build(test_debates)?;
    let shape = GnShape {
        node_dim: emb.dimension(),
        edge_dim: 3,
        global_dim,
        hidden,
    };
    let outcome = train(GnParameters::init(shape, init_seed), &train_samples, cfg)?;
    Ok(predict_samples(&outcome.params, &test_samples)?
        .into_iter()
        .map(argmax)
        .collect())
}
