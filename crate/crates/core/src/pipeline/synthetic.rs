//! Random debates with a controllable, planted outcome signal.
//!
//! Each debate holds four to eight lines of reasoning split between the two
//! stances. ADUs of one line are chained by inference or rephrase relations
//! and lines of opposite stance are joined by random conflicts. Embeddings
//! are isotropic Gaussian noise; the ADUs of the winning stance are shifted
//! by `signal` along a fixed axis, towards `+` for Favour and `-` for Against.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::embedding::{embedding_key, EmbeddingTable};
use crate::error::{Error, Result};
use crate::model::{Adu, Debate, Phase, Relation, RelationKind, Stance};

pub const DEFAULT_SYNTHETIC_DIMENSION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub debates: usize,
    pub signal: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
}

fn default_dimension() -> usize {
    DEFAULT_SYNTHETIC_DIMENSION
}

impl SyntheticConfig {
    pub fn new(debates: usize, signal: f64, seed: u64) -> Self {
        SyntheticConfig {
            debates,
            signal,
            seed,
            dimension: DEFAULT_SYNTHETIC_DIMENSION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.debates < 2 {
            return Err(Error::Config(
                "a synthetic corpus needs at least 2 debates".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.signal) {
            return Err(Error::Config(format!(
                "signal strength must lie in [0, 1], got {}",
                self.signal
            )));
        }
        if self.dimension == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        Ok(())
    }
}

pub fn generate_synthetic_corpus(
    n_debates: usize,
    signal: f64,
    seed: u64,
) -> Result<(Vec<Debate>, EmbeddingTable)> {
    generate(&SyntheticConfig::new(n_debates, signal, seed))
}

pub fn generate(cfg: &SyntheticConfig) -> Result<(Vec<Debate>, EmbeddingTable)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // Alternate winners, then shuffle: classes stay balanced to within one.
    let mut winners: Vec<Stance> = (0..cfg.debates)
        .map(|i| {
            if i % 2 == 0 {
                Stance::Favour
            } else {
                Stance::Against
            }
        })
        .collect();
    winners.shuffle(&mut rng);

    let mut table = EmbeddingTable::new(cfg.dimension)?;
    let scale = 1.0 / (cfg.dimension as f64).sqrt();
    let mut debates = Vec::with_capacity(cfg.debates);
    for (i, &winner) in winners.iter().enumerate() {
        let debate = random_debate(&mut rng, format!("syn{i:04}"), winner);
        for adu in &debate.adus {
            let mut v: Vec<f64> = (0..cfg.dimension)
                .map(|_| scale * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect();
            if adu.stance == winner {
                let sign = if winner == Stance::Favour { 1.0 } else { -1.0 };
                v[0] += sign * cfg.signal;
            }
            table.insert(embedding_key(&debate.id, &adu.id), v)?;
        }
        debates.push(debate);
    }
    Ok((debates, table))
}

fn random_debate(rng: &mut ChaCha8Rng, id: String, winner: Stance) -> Debate {
    let favour_lines = rng.random_range(2..=4);
    let against_lines = rng.random_range(2..=4);
    let mut stances = vec![Stance::Favour; favour_lines];
    stances.extend(std::iter::repeat_n(Stance::Against, against_lines));
    let mut lengths: Vec<usize> = stances.iter().map(|_| rng.random_range(2..=5)).collect();
    while lengths.iter().sum::<usize>() < 10 {
        let shortest = (0..lengths.len()).min_by_key(|&l| lengths[l]).unwrap();
        lengths[shortest] += 1;
    }

    let mut adus = Vec::new();
    let mut relations = Vec::new();
    let mut lines: Vec<Vec<String>> = Vec::new();
    for (line, (&stance, &len)) in stances.iter().zip(&lengths).enumerate() {
        let mut members: Vec<String> = Vec::with_capacity(len);
        for j in 0..len {
            let adu_id = format!("a{}", adus.len());
            let phase = match (line, j) {
                (_, 0) if line == 0 || line == favour_lines => Phase::Introduction,
                (_, j) if j + 1 == len && line + 1 == stances.len() => Phase::Conclusion,
                _ => Phase::Argumentation,
            };
            adus.push(Adu {
                id: adu_id.clone(),
                text: format!("{id} line {line} unit {j}"),
                stance,
                phase,
            });
            if let Some(anchor) = members.get(rng.random_range(0..members.len().max(1))) {
                let kind = if rng.random_bool(0.8) {
                    RelationKind::Inference
                } else {
                    RelationKind::Rephrase
                };
                let (source, target) = if rng.random_bool(0.5) {
                    (adu_id.clone(), anchor.clone())
                } else {
                    (anchor.clone(), adu_id.clone())
                };
                relations.push(Relation {
                    source,
                    target,
                    kind,
                });
            }
            members.push(adu_id);
        }
        lines.push(members);
    }

    for f in 0..favour_lines {
        for a in favour_lines..stances.len() {
            if !rng.random_bool(0.5) {
                continue;
            }
            let u = lines[f].choose(rng).unwrap().clone();
            let v = lines[a].choose(rng).unwrap().clone();
            let (source, target) = if rng.random_bool(0.5) { (u, v) } else { (v, u) };
            relations.push(Relation {
                source,
                target,
                kind: RelationKind::Conflict,
            });
        }
    }

    Debate {
        id,
        winner,
        adus,
        relations,
    }
}
