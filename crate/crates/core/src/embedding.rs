//! Per-ADU sentence embedding tables.
//!
//! File format (UTF-8):
//!
//! ```text
//! DIM <d>
//! <debate_id>/<adu_id>\t<f1> <f2> ... <fd>
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::Debate;

pub fn embedding_key(debate_id: &str, adu_id: &str) -> String {
    format!("{debate_id}/{adu_id}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Validation(
                "embedding dimension must be positive".into(),
            ));
        }
        Ok(EmbeddingTable {
            dimension,
            vectors: HashMap::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, key: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let key = key.into();
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: vector.len(),
                context: format!("embedding {key}"),
            });
        }
        if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("embedding {key} contains {bad}")));
        }
        self.vectors.insert(key, vector);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.vectors.get(key).map(Vec::as_slice)
    }

    pub fn lookup(&self, debate_id: &str, adu_id: &str) -> Result<&[f64]> {
        let key = embedding_key(debate_id, adu_id);
        self.get(&key).ok_or(Error::MissingEmbedding(key))
    }

    /// Keys in sorted order.
    pub fn keys(&self) -> Vec<&str> {
        let mut keys: Vec<&str> = self.vectors.keys().map(String::as_str).collect();
        keys.sort_unstable();
        keys
    }

    /// Embeds every ADU of every debate with [`hash_embed`].
    pub fn from_hash(debates: &[Debate], dimension: usize, seed: u64) -> Result<Self> {
        let mut table = EmbeddingTable::new(dimension)?;
        for d in debates {
            for adu in &d.adus {
                table.insert(
                    embedding_key(&d.id, &adu.id),
                    hash_embed(&adu.text, dimension, seed),
                )?;
            }
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("DIM {}\n", self.dimension);
        for key in self.keys() {
            out.push_str(key);
            out.push('\t');
            for (i, v) in self.vectors[key].iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = lines
            .next()
            .map(|(_, l)| l.trim())
            .ok_or_else(|| Error::Parse("empty embedding file".into()))?;
        let dimension = header
            .strip_prefix("DIM")
            .and_then(|d| d.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}, expected `DIM <d>`")))?;
        let mut table = EmbeddingTable::new(dimension)?;
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (key, values) = line.split_once('\t').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `<key>\\t<values>`", lineno + 1))
            })?;
            let vector = values
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if table.vectors.contains_key(key) {
                return Err(Error::Validation(format!(
                    "line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
            table.insert(key, vector).map_err(|e| match e {
                Error::NonFinite(msg) => Error::NonFinite(format!("line {}: {msg}", lineno + 1)),
                other => other,
            })?;
        }
        Ok(table)
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::from_text(&text)
}

pub fn write_embeddings(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, table.to_text()).map_err(|e| Error::io(path, e))
}

/// Deterministic unit-norm pseudo-embedding of a text.
///
/// A SHA-256 digest of `seed || text` seeds a ChaCha20 stream from which
/// Gaussian coordinates are drawn; the result is normalized.
pub fn hash_embed(text: &str, dimension: usize, seed: u64) -> Vec<f64> {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(text.as_bytes());
    let digest: [u8; 32] = hasher.finalize().into();
    let mut rng = ChaCha20Rng::from_seed(digest);
    let mut v: Vec<f64> = (0..dimension)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    } else if let Some(first) = v.first_mut() {
        *first = 1.0;
    }
    v
}
