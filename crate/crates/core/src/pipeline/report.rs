use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{ConfusionMatrix, Metrics};
use super::{ExperimentConfig, ModelKind, SolvedCorpus};
use crate::model::{Debate, Stance};
use crate::semantics::Semantics;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticsInfo {
    pub semantics: Semantics,
    pub extensions: usize,
    /// Non-empty extensions, one learning sample each.
    pub samples: usize,
    /// Samples per label, indexed by class (F, A).
    pub sample_classes: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub debates: usize,
    pub adus: usize,
    /// Debates won by each stance, indexed by class (F, A).
    pub winners: [usize; 2],
    pub semantics: Vec<SemanticsInfo>,
}

impl CorpusInfo {
    pub(super) fn new(debates: &[Debate], solved: &[SolvedCorpus]) -> Self {
        let mut winners = [0, 0];
        for d in debates {
            winners[d.winner.class_index()] += 1;
        }
        let semantics = solved
            .iter()
            .map(|s| {
                let mut sample_classes = [0, 0];
                let mut samples = 0;
                for (d, exts) in debates.iter().zip(&s.extensions) {
                    let n = exts.iter().filter(|e| !e.arguments.is_empty()).count();
                    samples += n;
                    sample_classes[d.winner.class_index()] += n;
                }
                SemanticsInfo {
                    semantics: s.semantics,
                    extensions: s.extensions.iter().map(Vec::len).sum(),
                    samples,
                    sample_classes,
                }
            })
            .collect();
        CorpusInfo {
            debates: debates.len(),
            adus: debates.iter().map(|d| d.adus.len()).sum(),
            winners,
            semantics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebateOutcome {
    pub debate_id: String,
    pub gold: Stance,
    pub predicted: Stance,
    /// Mean probability of the predicted class, for GN models.
    pub confidence: Option<f64>,
    /// Learning samples voting on the outcome, for GN models.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run: usize,
    pub seed: u64,
    pub train_debates: Vec<String>,
    pub test_debates: Vec<String>,
    /// Debate-wise scores.
    pub metrics: Metrics,
    pub confusion: ConfusionMatrix,
    /// Extension-wise scores over the test samples, for GN models.
    pub sample_metrics: Option<Metrics>,
    pub sample_confusion: Option<ConfusionMatrix>,
    pub train_samples: Option<usize>,
    pub final_loss: Option<f64>,
    pub predictions: Vec<DebateOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: ModelKind,
    pub label: String,
    pub implemented: bool,
    pub runs: Vec<RunReport>,
    pub averaged: Option<Metrics>,
    pub averaged_samples: Option<Metrics>,
    /// Debate-wise confusion summed over runs.
    pub confusion: ConfusionMatrix,
}

impl ModelReport {
    pub(super) fn new(model: ModelKind) -> Self {
        ModelReport {
            model,
            label: model.label().to_string(),
            implemented: model.is_implemented(),
            runs: Vec::new(),
            averaged: None,
            averaged_samples: None,
            confusion: ConfusionMatrix::default(),
        }
    }

    pub(super) fn finalize(&mut self) {
        let per_run: Vec<Metrics> = self.runs.iter().map(|r| r.metrics).collect();
        self.averaged = Metrics::mean(&per_run);
        let per_run: Vec<Metrics> = self.runs.iter().filter_map(|r| r.sample_metrics).collect();
        self.averaged_samples = Metrics::mean(&per_run);
        self.confusion = ConfusionMatrix::default();
        for r in &self.runs {
            self.confusion.add(&r.confusion);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub corpus: CorpusInfo,
    pub models: Vec<ModelReport>,
}

impl EvalReport {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.corpus;
        let _ = writeln!(
            out,
            "corpus: {} debates, {} ADUs, winners F={} A={}",
            c.debates, c.adus, c.winners[0], c.winners[1]
        );
        for s in &c.semantics {
            let _ = writeln!(
                out,
                "{}: {} extensions, {} samples (F={} A={})",
                s.semantics, s.extensions, s.samples, s.sample_classes[0], s.sample_classes[1]
            );
        }
        let _ = writeln!(
            out,
            "runs: {} (split ratio {}, {} split)\n",
            self.config.runs,
            self.config.split_ratio,
            if self.config.fixed_split {
                "fixed"
            } else {
                "per-run"
            }
        );
        let _ = writeln!(
            out,
            "{:<14} {:>9} {:>9} {:>9}   {:>22}",
            "model", "precision", "recall", "w-F1", "extension-wise w-F1"
        );
        for m in &self.models {
            match m.averaged {
                None => {
                    let _ = writeln!(out, "{:<14} not implemented", m.label);
                }
                Some(avg) => {
                    let samples = m
                        .averaged_samples
                        .map(|s| format!("{:.4}", s.f1))
                        .unwrap_or_else(|| "-".into());
                    let _ = writeln!(
                        out,
                        "{:<14} {:>9.4} {:>9.4} {:>9.4}   {:>22}",
                        m.label, avg.precision, avg.recall, avg.f1, samples
                    );
                }
            }
        }
        for m in self.models.iter().filter(|m| !m.runs.is_empty()) {
            let _ = writeln!(out, "\n{}", m.label);
            for r in &m.runs {
                let _ = write!(out, "  run {} (seed {}): {}", r.run, r.seed, r.metrics);
                if let Some(s) = r.sample_metrics {
                    let _ = write!(out, "  [extension-wise {s}]");
                }
                out.push('\n');
            }
            let _ = write!(out, "  confusion, summed over runs:\n{}", m.confusion);
        }
        out
    }
}
