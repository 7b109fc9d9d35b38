//! Stochastic gradient descent training and debate-level prediction.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::network::{batch_gradient, gn_forward, GnParameters, CLASSES};
use crate::error::{Error, Result};
use crate::model::Stance;
use crate::sample::LearningSample;

/// Optimizer settings. The loss is always two-class cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            epochs: 100,
            batch_size: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: GnParameters,
    /// Mean training loss of each epoch, measured before each update.
    pub loss_history: Vec<f64>,
}

/// Mini-batch SGD over `samples`.
///
/// Each epoch visits the samples in an order drawn from a generator seeded
/// with `cfg.seed`; each step subtracts `learning_rate` times the batch-mean
/// gradient. The run is fully deterministic given the inputs.
pub fn train(
    params: GnParameters,
    samples: &[LearningSample],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("no training samples".into()));
    }
    let mut params = params;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&LearningSample> = chunk.iter().map(|&i| &samples[i]).collect();
            let (loss, grad) = match batch_gradient(&params, &batch) {
                Err(Error::NonFinite(msg)) => {
                    log::error!("epoch {epoch}: {msg}");
                    return Err(Error::Divergence {
                        epoch,
                        loss: f64::NAN,
                    });
                }
                other => other?,
            };
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
            epoch_loss += loss;
            params.add_scaled(&grad, -cfg.learning_rate / batch.len() as f64);
        }
        let mean = epoch_loss / samples.len() as f64;
        log::debug!("epoch {epoch}: mean loss {mean:.6}");
        if !params.all_finite() {
            return Err(Error::Divergence { epoch, loss: mean });
        }
        history.push(mean);
    }
    Ok(TrainOutcome {
        params,
        loss_history: history,
    })
}

/// Class probabilities for many samples, evaluated in parallel.
pub fn predict_samples(
    params: &GnParameters,
    samples: &[LearningSample],
) -> Result<Vec<[f64; CLASSES]>> {
    samples.par_iter().map(|s| gn_forward(params, s)).collect()
}

pub fn argmax(probs: [f64; CLASSES]) -> Stance {
    if probs[1] > probs[0] {
        Stance::Against
    } else {
        Stance::Favour
    }
}

/// Fraction of samples whose argmax class matches the label.
pub fn accuracy(params: &GnParameters, samples: &[LearningSample]) -> Result<f64> {
    if samples.is_empty() {
        return Ok(0.0);
    }
    let probs = predict_samples(params, samples)?;
    let hits = probs
        .iter()
        .zip(samples)
        .filter(|(p, s)| argmax(**p) == s.label)
        .count();
    Ok(hits as f64 / samples.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DebatePrediction {
    pub class: Stance,
    /// Mean probability of the chosen class over the debate's samples.
    pub confidence: f64,
    pub votes: [usize; CLASSES],
    pub mean_probs: [f64; CLASSES],
}

/// Majority vote over per-sample argmax classes. A tied vote goes to the
/// class with the larger mean probability, and a full tie to Favour.
pub fn aggregate_votes(probs: &[[f64; CLASSES]]) -> Result<DebatePrediction> {
    if probs.is_empty() {
        return Err(Error::InvalidInput("no samples to vote with".into()));
    }
    let mut votes = [0usize; CLASSES];
    let mut mean_probs = [0.0; CLASSES];
    for p in probs {
        votes[argmax(*p).class_index()] += 1;
        mean_probs[0] += p[0];
        mean_probs[1] += p[1];
    }
    mean_probs.iter_mut().for_each(|m| *m /= probs.len() as f64);
    let class = match votes[0].cmp(&votes[1]) {
        std::cmp::Ordering::Greater => Stance::Favour,
        std::cmp::Ordering::Less => Stance::Against,
        std::cmp::Ordering::Equal => argmax(mean_probs),
    };
    Ok(DebatePrediction {
        class,
        confidence: mean_probs[class.class_index()],
        votes,
        mean_probs,
    })
}

/// Debate-level class from all samples of one debate.
pub fn predict_debate(
    params: &GnParameters,
    samples: &[&LearningSample],
) -> Result<DebatePrediction> {
    let probs = samples
        .iter()
        .map(|s| gn_forward(params, s))
        .collect::<Result<Vec<_>>>()?;
    aggregate_votes(&probs)
}
