//! Debate outcome prediction from annotated argument graphs.
//!
//! The pipeline has two phases. First, a debate's argument graph is
//! collapsed into an abstract argumentation framework ([`encoder`]) whose
//! acceptable extensions are enumerated under Naïve or Preferred semantics
//! ([`semantics`]). Second, every extension becomes a complete bipartite
//! graph over its Favour and Against arguments ([`sample`]) that a graph
//! network ([`gn`]) classifies by winning stance. [`pipeline`] ties the
//! phases together with baselines, metrics and experiment reports.

pub mod apx;
pub mod embedding;
pub mod encoder;
pub mod error;
pub mod framework;
pub mod gn;
pub mod model;
pub mod pipeline;
pub mod sample;
pub mod semantics;

pub use error::{Error, Result};
