//! End-to-end experiments: debate-wise holdout splits, baselines, GN
//! training, metrics averaged over sequential runs, and reports.

mod baselines;
mod metrics;
mod report;
mod synthetic;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use baselines::{
    atb_predict, baseline_atb, baseline_gnb, baseline_random, split_debates, split_indices,
    stance_totals, Split,
};
pub use metrics::{metrics, ConfusionMatrix, Metrics};
pub use report::{
    CorpusInfo, DebateOutcome, EvalReport, ModelReport, RunReport, SemanticsInfo,
    REPORT_SCHEMA_VERSION,
};
pub use synthetic::{
    generate, generate_synthetic_corpus, SyntheticConfig, DEFAULT_SYNTHETIC_DIMENSION,
};

use crate::embedding::{load_embeddings, EmbeddingTable};
use crate::encoder::{encode_af, DebateFramework};
use crate::error::{Error, Result};
use crate::gn::{
    aggregate_votes, argmax, predict_samples, train, GnParameters, GnShape, TrainConfig,
    DEFAULT_HIDDEN,
};
use crate::model::{load_corpus, Debate, Stance};
use crate::sample::{build_samples, FeatureConfig, LearningSample};
use crate::semantics::{solve_debate, Extension, Semantics, SolverLimits};

/// Rows of the results table, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Random,
    NaiveAtb,
    PreferredAtb,
    /// Transformer text baseline; listed for layout only.
    Longformer,
    Gnb,
    NaiveGn,
    PreferredGn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Random,
        ModelKind::NaiveAtb,
        ModelKind::PreferredAtb,
        ModelKind::Longformer,
        ModelKind::Gnb,
        ModelKind::NaiveGn,
        ModelKind::PreferredGn,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Random => "RB",
            ModelKind::NaiveAtb => "Naïve-ATB",
            ModelKind::PreferredAtb => "Preferred-ATB",
            ModelKind::Longformer => "Longformer",
            ModelKind::Gnb => "GNB",
            ModelKind::NaiveGn => "Naïve-GN",
            ModelKind::PreferredGn => "Preferred-GN",
        }
    }

    /// Semantics whose extensions the model consumes.
    pub fn semantics(self) -> Option<Semantics> {
        match self {
            ModelKind::NaiveAtb | ModelKind::NaiveGn => Some(Semantics::Naive),
            ModelKind::PreferredAtb | ModelKind::PreferredGn => Some(Semantics::Preferred),
            _ => None,
        }
    }

    pub fn needs_embeddings(self) -> bool {
        matches!(
            self,
            ModelKind::Gnb | ModelKind::NaiveGn | ModelKind::PreferredGn
        )
    }

    pub fn is_implemented(self) -> bool {
        self != ModelKind::Longformer
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum EmbeddingSource {
    /// A `DIM d` embedding file keyed by `debate/adu`.
    File { path: PathBuf },
    /// Deterministic text hashes; carries no semantic content.
    Hash {
        #[serde(default = "default_hash_dimension")]
        dimension: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_hash_dimension() -> usize {
    768
}

impl Default for EmbeddingSource {
    fn default() -> Self {
        EmbeddingSource::Hash {
            dimension: default_hash_dimension(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Directory of debate JSON files. Exactly one of `corpus` and `synthetic` is set.
    pub corpus: Option<PathBuf>,
    pub synthetic: Option<SyntheticConfig>,
    /// Ignored for synthetic corpora, which bring their own table.
    pub embeddings: EmbeddingSource,
    pub models: Vec<ModelKind>,
    pub split_ratio: f64,
    pub runs: usize,
    /// Run `r` uses `seed + r` for its split, initialization and baselines.
    pub seed: u64,
    /// Reuse the split of run 0 in every run.
    pub fixed_split: bool,
    pub hidden: usize,
    pub features: FeatureConfig,
    pub train: TrainConfig,
    pub max_extensions: usize,
    pub timeout_secs: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let limits = SolverLimits::default();
        ExperimentConfig {
            corpus: None,
            synthetic: None,
            embeddings: EmbeddingSource::default(),
            models: ModelKind::ALL.to_vec(),
            split_ratio: 0.8,
            runs: 3,
            seed: 0,
            fixed_split: false,
            hidden: DEFAULT_HIDDEN,
            features: FeatureConfig::default(),
            train: TrainConfig::default(),
            max_extensions: limits.max_extensions,
            timeout_secs: limits.timeout.map(|t| t.as_secs_f64()),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.corpus, &self.synthetic) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set either `corpus` or `[synthetic]`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config("no `corpus` or `[synthetic]` section".into()))
            }
            (None, Some(s)) => s.validate()?,
            _ => {}
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::Config(format!(
                "split_ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models selected".into()));
        }
        if self.hidden == 0 {
            return Err(Error::Config("hidden must be positive".into()));
        }
        if let Some(t) = self.timeout_secs {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!(
                    "timeout_secs must be positive, got {t}"
                )));
            }
        }
        self.train.validate()
    }

    pub fn limits(&self) -> SolverLimits {
        SolverLimits {
            max_extensions: self.max_extensions,
            timeout: self.timeout_secs.map(Duration::from_secs_f64),
        }
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let Some(c) = &mut self.corpus {
            if c.is_relative() {
                *c = base.join(&*c);
            }
        }
        if let EmbeddingSource::File { path } = &mut self.embeddings {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

/// Reads a TOML experiment file; relative paths resolve against its directory.
pub fn load_experiment_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg = ExperimentConfig::from_toml_str(&text)?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(cfg)
}

/// Phase I output for one semantics, indexed like the corpus.
struct SolvedCorpus {
    semantics: Semantics,
    extensions: Vec<Vec<Extension>>,
    samples: Option<Vec<Vec<LearningSample>>>,
}

fn load_data(cfg: &ExperimentConfig) -> Result<(Vec<Debate>, Option<EmbeddingTable>)> {
    if let Some(s) = &cfg.synthetic {
        let (debates, emb) = generate(s)?;
        return Ok((debates, Some(emb)));
    }
    let dir = cfg.corpus.as_ref().expect("validated config has a corpus");
    let debates = load_corpus(dir)?;
    if !cfg.models.iter().any(|m| m.needs_embeddings()) {
        return Ok((debates, None));
    }
    let emb = match &cfg.embeddings {
        EmbeddingSource::File { path } => load_embeddings(path)?,
        EmbeddingSource::Hash { dimension, seed } => {
            EmbeddingTable::from_hash(&debates, *dimension, *seed)?
        }
    };
    Ok((debates, Some(emb)))
}

fn solve_corpus(
    frameworks: &[DebateFramework],
    semantics: Semantics,
    limits: SolverLimits,
) -> Result<Vec<Vec<Extension>>> {
    frameworks
        .par_iter()
        .map(|df| {
            solve_debate(df, semantics, limits)
                .map_err(Error::in_stage(format!("debate {}", df.debate_id)))
        })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let (debates, emb) = load_data(cfg).map_err(Error::in_stage("loading data"))?;
    let frameworks: Vec<DebateFramework> = debates
        .par_iter()
        .map(|d| encode_af(d).map_err(Error::in_stage(format!("debate {}", d.id))))
        .collect::<Result<_>>()
        .map_err(Error::in_stage("encoding frameworks"))?;

    let mut solved: Vec<SolvedCorpus> = Vec::new();
    for semantics in [Semantics::Naive, Semantics::Preferred] {
        let used_by: Vec<ModelKind> = cfg
            .models
            .iter()
            .copied()
            .filter(|m| m.semantics() == Some(semantics))
            .collect();
        if used_by.is_empty() {
            continue;
        }
        let extensions = solve_corpus(&frameworks, semantics, cfg.limits())
            .map_err(Error::in_stage(format!("{semantics} enumeration")))?;
        let samples = if used_by.iter().any(|m| m.needs_embeddings()) {
            let emb = emb.as_ref().expect("embeddings loaded for GN models");
            let built = frameworks
                .par_iter()
                .zip(&extensions)
                .map(|(df, exts)| build_samples(df, exts, emb, &cfg.features))
                .collect::<Result<Vec<_>>>()
                .map_err(Error::in_stage(format!("{semantics} sample building")))?;
            Some(built)
        } else {
            None
        };
        log::info!(
            "{semantics}: {} extensions over {} debates",
            extensions.iter().map(Vec::len).sum::<usize>(),
            debates.len()
        );
        solved.push(SolvedCorpus {
            semantics,
            extensions,
            samples,
        });
    }

    let corpus = CorpusInfo::new(&debates, &solved);
    let golds: Vec<Stance> = debates.iter().map(|d| d.winner).collect();
    let mut models: Vec<ModelReport> = cfg.models.iter().map(|&m| ModelReport::new(m)).collect();

    for run in 0..cfg.runs {
        let run_seed = cfg.seed.wrapping_add(run as u64);
        let split_seed = if cfg.fixed_split { cfg.seed } else { run_seed };
        let split = split_indices(debates.len(), cfg.split_ratio, split_seed)
            .map_err(Error::in_stage(format!("run {run}: split")))?;
        let test_golds: Vec<Stance> = split.test.iter().map(|&i| golds[i]).collect();
        for report in &mut models {
            let kind = report.model;
            if !kind.is_implemented() {
                continue;
            }
            let stage = format!("run {run}: {}", kind.label());
            log::info!("{stage}");
            let ctx = RunContext {
                cfg,
                debates: &debates,
                frameworks: &frameworks,
                emb: emb.as_ref(),
                solved: &solved,
                split: &split,
                run_seed,
            };
            let outcome = ctx.predict(kind).map_err(Error::in_stage(stage.clone()))?;
            let predicted: Vec<Stance> = outcome.predictions.iter().map(|p| p.0).collect();
            let confusion = ConfusionMatrix::from_pairs(&predicted, &test_golds)
                .map_err(Error::in_stage(stage))?;
            let predictions = split
                .test
                .iter()
                .zip(&outcome.predictions)
                .map(|(&i, &(predicted, confidence, samples))| DebateOutcome {
                    debate_id: debates[i].id.clone(),
                    gold: golds[i],
                    predicted,
                    confidence,
                    samples,
                })
                .collect();
            report.runs.push(RunReport {
                run,
                seed: run_seed,
                train_debates: split.train.iter().map(|&i| debates[i].id.clone()).collect(),
                test_debates: split.test.iter().map(|&i| debates[i].id.clone()).collect(),
                metrics: confusion.metrics(),
                confusion,
                sample_metrics: outcome.sample_confusion.map(|c| c.metrics()),
                sample_confusion: outcome.sample_confusion,
                train_samples: outcome.train_samples,
                final_loss: outcome.final_loss,
                predictions,
            });
        }
    }
    for report in &mut models {
        report.finalize();
    }
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        corpus,
        models,
    })
}

struct RunContext<'a> {
    cfg: &'a ExperimentConfig,
    debates: &'a [Debate],
    frameworks: &'a [DebateFramework],
    emb: Option<&'a EmbeddingTable>,
    solved: &'a [SolvedCorpus],
    split: &'a Split,
    run_seed: u64,
}

#[derive(Default)]
struct ModelOutcome {
    /// (class, confidence, sample count) per test debate.
    predictions: Vec<(Stance, Option<f64>, Option<usize>)>,
    sample_confusion: Option<ConfusionMatrix>,
    train_samples: Option<usize>,
    final_loss: Option<f64>,
}

impl RunContext<'_> {
    fn solved(&self, semantics: Semantics) -> &SolvedCorpus {
        self.solved
            .iter()
            .find(|s| s.semantics == semantics)
            .expect("semantics solved for every selected model")
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.cfg.train.seed.wrapping_add(self.run_seed),
            ..self.cfg.train
        }
    }

    fn predict(&self, kind: ModelKind) -> Result<ModelOutcome> {
        let plain = |preds: Vec<Stance>| ModelOutcome {
            predictions: preds.into_iter().map(|p| (p, None, None)).collect(),
            ..ModelOutcome::default()
        };
        match kind {
            ModelKind::Random => Ok(plain(baseline_random(self.split.test.len(), self.run_seed))),
            ModelKind::NaiveAtb | ModelKind::PreferredAtb => {
                let solved = self.solved(kind.semantics().unwrap());
                Ok(plain(
                    self.split
                        .test
                        .iter()
                        .map(|&i| atb_predict(&self.frameworks[i], &solved.extensions[i]))
                        .collect(),
                ))
            }
            ModelKind::Gnb => {
                let pick = |idx: &[usize]| -> Vec<Debate> {
                    idx.iter().map(|&i| self.debates[i].clone()).collect()
                };
                let preds = baseline_gnb(
                    &pick(&self.split.train),
                    &pick(&self.split.test),
                    self.emb.expect("embeddings loaded"),
                    &self.train_config(),
                    self.cfg.hidden,
                    self.cfg.features.global_dim,
                    self.run_seed,
                )?;
                let mut out = plain(preds);
                out.train_samples = Some(self.split.train.len());
                Ok(out)
            }
            ModelKind::NaiveGn | ModelKind::PreferredGn => {
                self.predict_gn(self.solved(kind.semantics().unwrap()))
            }
            ModelKind::Longformer => unreachable!("not implemented models are skipped"),
        }
    }

    fn predict_gn(&self, solved: &SolvedCorpus) -> Result<ModelOutcome> {
        let samples = solved
            .samples
            .as_ref()
            .expect("samples built for GN models");
        let train_set: Vec<LearningSample> = self
            .split
            .train
            .iter()
            .flat_map(|&i| samples[i].iter().cloned())
            .collect();
        // Structural leak check: every training sample carries a train-debate id.
        let train_ids: HashSet<&str> = self
            .split
            .train
            .iter()
            .map(|&i| self.debates[i].id.as_str())
            .collect();
        if let Some(leak) = train_set
            .iter()
            .find(|s| !train_ids.contains(s.debate_id.as_str()))
        {
            return Err(Error::Validation(format!(
                "sample of debate {} leaked into training",
                leak.debate_id
            )));
        }
        if train_set.is_empty() {
            return Err(Error::InvalidInput(format!(
                "no {} samples in the training split",
                solved.semantics
            )));
        }
        let emb = self.emb.expect("embeddings loaded");
        let shape = GnShape {
            node_dim: emb.dimension(),
            edge_dim: self.cfg.features.edge_dim,
            global_dim: self.cfg.features.global_dim,
            hidden: self.cfg.hidden,
        };
        let outcome = train(
            GnParameters::init(shape, self.run_seed),
            &train_set,
            &self.train_config(),
        )?;
        let params = outcome.params;

        let mut sample_confusion = ConfusionMatrix::default();
        let mut predictions = Vec::with_capacity(self.split.test.len());
        for &i in &self.split.test {
            let debate_samples = &samples[i];
            if debate_samples.is_empty() {
                log::warn!(
                    "debate {} has no {} samples; predicting F",
                    self.debates[i].id,
                    solved.semantics
                );
                predictions.push((Stance::Favour, None, Some(0)));
                continue;
            }
            let probs = predict_samples(&params, debate_samples)?;
            for (p, s) in probs.iter().zip(debate_samples) {
                sample_confusion.counts[s.label.class_index()][argmax(*p).class_index()] += 1;
            }
            let vote = aggregate_votes(&probs)?;
            predictions.push((
                vote.class,
                Some(vote.confidence),
                Some(debate_samples.len()),
            ));
        }
        Ok(ModelOutcome {
            predictions,
            sample_confusion: Some(sample_confusion),
            train_samples: Some(train_set.len()),
            final_loss: outcome.loss_history.last().copied(),
        })
    }
}
