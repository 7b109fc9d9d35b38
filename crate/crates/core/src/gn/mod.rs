//! Graph network over learning samples.

pub mod checkpoint;
pub mod dense;
mod network;
mod train;

pub use checkpoint::{checkpoint_from_str, checkpoint_to_string, load_checkpoint, save_checkpoint};
pub use network::{
    accumulate_gradient, batch_gradient, gn_forward, gn_forward_trace, gn_gradient, gn_loss,
    GnParameters, GnShape, GnTrace, CLASSES, DEFAULT_HIDDEN,
};
pub use train::{
    accuracy, aggregate_votes, argmax, predict_debate, predict_samples, train, DebatePrediction,
    TrainConfig, TrainOutcome,
};

#[cfg(test)]
mod tests;
