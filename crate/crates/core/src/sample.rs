//! Learning samples: complete bipartite graphs built from extensions.
//!
//! Each extension yields one graph. Its nodes are the extension's arguments,
//! split into a Favour and an Against block; every cross-block pair is
//! joined by a directed edge in each direction.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::encoder::DebateFramework;
use crate::error::{Error, Result};
use crate::framework::ArgId;
use crate::model::{Debate, Stance};
use crate::semantics::Extension;

/// Where a sample's graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleSource {
    Naive,
    Preferred,
    /// The raw argument graph, nodes being ADUs.
    Graph,
}

impl From<crate::semantics::Semantics> for SampleSource {
    fn from(s: crate::semantics::Semantics) -> Self {
        match s {
            crate::semantics::Semantics::Naive => SampleSource::Naive,
            crate::semantics::Semantics::Preferred => SampleSource::Preferred,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleNode {
    /// Abstract argument id (or ADU position for raw-graph samples).
    pub argument: usize,
    pub stance: Stance,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEdge {
    /// Index into the sample's node list.
    pub sender: usize,
    pub receiver: usize,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningSample {
    pub debate_id: String,
    pub source: SampleSource,
    pub nodes: Vec<SampleNode>,
    pub edges: Vec<SampleEdge>,
    pub global: Vec<f64>,
    /// Winning stance; class 0 is Favour, class 1 Against.
    pub label: Stance,
}

impl LearningSample {
    pub fn class(&self) -> usize {
        self.label.class_index()
    }

    pub fn node_dim(&self) -> Option<usize> {
        self.nodes.first().map(|n| n.features.len())
    }

    pub fn edge_dim(&self) -> Option<usize> {
        self.edges.first().map(|e| e.features.len())
    }

    pub fn block_sizes(&self) -> (usize, usize) {
        let favour = self
            .nodes
            .iter()
            .filter(|n| n.stance == Stance::Favour)
            .count();
        (favour, self.nodes.len() - favour)
    }

    /// Checks index ranges and that feature widths are uniform.
    pub fn validate(&self) -> Result<()> {
        let node_dim = self.node_dim().unwrap_or(0);
        for n in &self.nodes {
            if n.features.len() != node_dim {
                return Err(Error::DimensionMismatch {
                    expected: node_dim,
                    found: n.features.len(),
                    context: format!("node features in sample of {}", self.debate_id),
                });
            }
        }
        let edge_dim = self.edge_dim().unwrap_or(0);
        for e in &self.edges {
            if e.sender >= self.nodes.len() || e.receiver >= self.nodes.len() {
                return Err(Error::Validation(format!(
                    "edge {}->{} out of range in sample of {}",
                    e.sender, e.receiver, self.debate_id
                )));
            }
            if e.features.len() != edge_dim {
                return Err(Error::DimensionMismatch {
                    expected: edge_dim,
                    found: e.features.len(),
                    context: format!("edge features in sample of {}", self.debate_id),
                });
            }
        }
        Ok(())
    }
}

/// Sample graph before features are attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    /// Nodes sorted by argument id.
    pub nodes: Vec<(ArgId, Stance)>,
    /// (sender, receiver) node indices.
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn build_bipartite(ext: &Extension, df: &DebateFramework) -> BipartiteGraph {
    let nodes: Vec<(ArgId, Stance)> = ext
        .arguments
        .iter()
        .map(|&a| (a, df.arguments[a].stance))
        .collect();
    let mut edges = Vec::new();
    for (f, &(_, sf)) in nodes.iter().enumerate() {
        if sf != Stance::Favour {
            continue;
        }
        for (a, &(_, sa)) in nodes.iter().enumerate() {
            if sa == Stance::Against {
                edges.push((f, a));
                edges.push((a, f));
            }
        }
    }
    BipartiteGraph { nodes, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub edge_dim: usize,
    pub edge_value: f64,
    pub global_dim: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            edge_dim: 8,
            edge_value: 1.0,
            global_dim: 2,
        }
    }
}

/// Element-wise mean of equally long vectors.
fn mean_vector<'a>(vectors: impl IntoIterator<Item = &'a [f64]>, dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    let mut count = 0usize;
    for v in vectors {
        acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
        count += 1;
    }
    if count > 0 {
        acc.iter_mut().for_each(|a| *a /= count as f64);
    }
    acc
}

/// Attaches features: node = mean of member-ADU embeddings, every edge the
/// same constant vector, global input zero, label from the debate winner.
pub fn init_features(
    graph: &BipartiteGraph,
    df: &DebateFramework,
    emb: &EmbeddingTable,
    cfg: &FeatureConfig,
    source: SampleSource,
) -> Result<LearningSample> {
    let dim = emb.dimension();
    let nodes = graph
        .nodes
        .iter()
        .map(|&(arg, stance)| {
            let members = df.arguments[arg]
                .adu_ids
                .iter()
                .map(|adu| emb.lookup(&df.debate_id, adu))
                .collect::<Result<Vec<_>>>()?;
            Ok(SampleNode {
                argument: arg,
                stance,
                features: mean_vector(members, dim),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = graph
        .edges
        .iter()
        .map(|&(sender, receiver)| SampleEdge {
            sender,
            receiver,
            features: vec![cfg.edge_value; cfg.edge_dim],
        })
        .collect();
    Ok(LearningSample {
        debate_id: df.debate_id.clone(),
        source,
        nodes,
        edges,
        global: vec![0.0; cfg.global_dim],
        label: df.winner,
    })
}

/// One sample per extension; extensions with no arguments are dropped.
pub fn build_samples(
    df: &DebateFramework,
    extensions: &[Extension],
    emb: &EmbeddingTable,
    cfg: &FeatureConfig,
) -> Result<Vec<LearningSample>> {
    let mut out = Vec::with_capacity(extensions.len());
    for ext in extensions {
        let graph = build_bipartite(ext, df);
        if graph.is_empty() {
            log::warn!(
                "debate {}: skipping empty {} extension",
                df.debate_id,
                ext.semantics
            );
            continue;
        }
        out.push(init_features(&graph, df, emb, cfg, ext.semantics.into())?);
    }
    Ok(out)
}

/// Raw argument graph as a sample: ADU nodes, one edge per relation with a
/// one-hot relation-kind feature.
pub fn graph_sample(
    debate: &Debate,
    emb: &EmbeddingTable,
    global_dim: usize,
) -> Result<LearningSample> {
    let position: std::collections::HashMap<&str, usize> = debate
        .adus
        .iter()
        .enumerate()
        .map(|(i, a)| (a.id.as_str(), i))
        .collect();
    let nodes = debate
        .adus
        .iter()
        .enumerate()
        .map(|(i, adu)| {
            Ok(SampleNode {
                argument: i,
                stance: adu.stance,
                features: emb.lookup(&debate.id, &adu.id)?.to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = debate
        .relations
        .iter()
        .map(|rel| {
            let idx = |id: &str| {
                position
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::Validation(format!("unknown ADU {id:?}")))
            };
            let mut features = vec![0.0; 3];
            features[rel.kind.one_hot_index()] = 1.0;
            Ok(SampleEdge {
                sender: idx(&rel.source)?,
                receiver: idx(&rel.target)?,
                features,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LearningSample {
        debate_id: debate.id.clone(),
        source: SampleSource::Graph,
        nodes,
        edges,
        global: vec![0.0; global_dim],
        label: debate.winner,
    })
}

pub const SAMPLE_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SampleFile {
    version: u32,
    samples: Vec<LearningSample>,
}

pub fn write_samples(samples: &[LearningSample], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = SampleFile {
        version: SAMPLE_FILE_VERSION,
        samples: samples.to_vec(),
    };
    let text = serde_json::to_string(&file).expect("sample serialization is infallible");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_samples(path: impl AsRef<Path>) -> Result<Vec<LearningSample>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: SampleFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.version != SAMPLE_FILE_VERSION {
        return Err(Error::Parse(format!(
            "unsupported sample file version {}",
            file.version
        )));
    }
    for s in &file.samples {
        s.validate()?;
    }
    Ok(file.samples)
}
