//! Annotated debate data model.
//!
//! A [`Debate`] is a set of argumentative discourse units ([`Adu`]) with
//! typed directed [`Relation`]s between them and a binary jury verdict.
//! Debates are stored as canonical JSON:
//!
//! ```json
//! {
//!   "id": "d01",
//!   "winner": "F",
//!   "adus": [{"id": "1", "text": "...", "stance": "F", "phase": "intro"}],
//!   "relations": [{"source": "1", "target": "2", "kind": "conflict"}]
//! }
//! ```

pub mod convert;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side of the debated topic. Doubles as the class label (Favour = 0, Against = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stance {
    #[serde(rename = "F")]
    Favour,
    #[serde(rename = "A")]
    Against,
}

impl Stance {
    pub const ALL: [Stance; 2] = [Stance::Favour, Stance::Against];

    pub fn class_index(self) -> usize {
        match self {
            Stance::Favour => 0,
            Stance::Against => 1,
        }
    }

    pub fn from_class_index(index: usize) -> Option<Stance> {
        match index {
            0 => Some(Stance::Favour),
            1 => Some(Stance::Against),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Stance::Favour => "F",
            Stance::Against => "A",
        }
    }

    pub fn parse_code(code: &str) -> Option<Stance> {
        match code {
            "F" => Some(Stance::Favour),
            "A" => Some(Stance::Against),
            _ => None,
        }
    }

    pub fn opposite(self) -> Stance {
        match self {
            Stance::Favour => Stance::Against,
            Stance::Against => Stance::Favour,
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "intro")]
    Introduction,
    #[serde(rename = "arg")]
    Argumentation,
    #[serde(rename = "concl")]
    Conclusion,
}

impl Phase {
    pub fn code(self) -> &'static str {
        match self {
            Phase::Introduction => "intro",
            Phase::Argumentation => "arg",
            Phase::Conclusion => "concl",
        }
    }

    pub fn parse_code(code: &str) -> Option<Phase> {
        match code {
            "intro" => Some(Phase::Introduction),
            "arg" => Some(Phase::Argumentation),
            "concl" => Some(Phase::Conclusion),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Inference,
    Conflict,
    Rephrase,
}

impl RelationKind {
    pub const ALL: [RelationKind; 3] = [
        RelationKind::Inference,
        RelationKind::Conflict,
        RelationKind::Rephrase,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RelationKind::Inference => "inference",
            RelationKind::Conflict => "conflict",
            RelationKind::Rephrase => "rephrase",
        }
    }

    pub fn parse_code(code: &str) -> Option<RelationKind> {
        match code {
            "inference" => Some(RelationKind::Inference),
            "conflict" => Some(RelationKind::Conflict),
            "rephrase" => Some(RelationKind::Rephrase),
            _ => None,
        }
    }

    /// Position in the one-hot relation-kind encoding.
    pub fn one_hot_index(self) -> usize {
        match self {
            RelationKind::Inference => 0,
            RelationKind::Conflict => 1,
            RelationKind::Rephrase => 2,
        }
    }
}

/// Argumentative discourse unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adu {
    pub id: String,
    pub text: String,
    pub stance: Stance,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub source: String,
    pub target: String,
    pub kind: RelationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Debate {
    pub id: String,
    pub winner: Stance,
    pub adus: Vec<Adu>,
    pub relations: Vec<Relation>,
}

// Enum fields are read as plain strings so that a bad code surfaces as a
// validation error naming the offending value instead of a serde message.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDebate {
    id: String,
    winner: String,
    #[serde(default)]
    adus: Vec<RawAdu>,
    #[serde(default)]
    relations: Vec<RawRelation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdu {
    id: String,
    text: String,
    stance: String,
    phase: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelation {
    source: String,
    target: String,
    kind: String,
}

impl RawDebate {
    fn into_debate(self) -> Result<Debate> {
        let winner = Stance::parse_code(&self.winner).ok_or_else(|| {
            Error::Validation(format!("debate {}: bad winner {:?}", self.id, self.winner))
        })?;
        let adus = self
            .adus
            .into_iter()
            .map(|raw| {
                let stance = Stance::parse_code(&raw.stance).ok_or_else(|| {
                    Error::Validation(format!("ADU {}: bad stance {:?}", raw.id, raw.stance))
                })?;
                let phase = Phase::parse_code(&raw.phase).ok_or_else(|| {
                    Error::Validation(format!("ADU {}: bad phase {:?}", raw.id, raw.phase))
                })?;
                Ok(Adu {
                    id: raw.id,
                    text: raw.text,
                    stance,
                    phase,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let relations = self
            .relations
            .into_iter()
            .map(|raw| {
                let kind = RelationKind::parse_code(&raw.kind).ok_or_else(|| {
                    Error::Validation(format!(
                        "relation {} -> {}: bad kind {:?}",
                        raw.source, raw.target, raw.kind
                    ))
                })?;
                Ok(Relation {
                    source: raw.source,
                    target: raw.target,
                    kind,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Debate {
            id: self.id,
            winner,
            adus,
            relations,
        })
    }
}

impl Debate {
    /// Checks every data-model invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.adus.len());
        for adu in &self.adus {
            if !seen.insert(adu.id.as_str()) {
                return Err(Error::Validation(format!(
                    "debate {}: duplicate ADU id {:?}",
                    self.id, adu.id
                )));
            }
            if adu.text.trim().is_empty() {
                return Err(Error::Validation(format!(
                    "debate {}: ADU {:?} has empty text",
                    self.id, adu.id
                )));
            }
        }
        for rel in &self.relations {
            for endpoint in [&rel.source, &rel.target] {
                if !seen.contains(endpoint.as_str()) {
                    return Err(Error::Validation(format!(
                        "debate {}: relation endpoint {:?} does not name an ADU",
                        self.id, endpoint
                    )));
                }
            }
            if rel.source == rel.target {
                return Err(Error::Validation(format!(
                    "debate {}: self-relation on ADU {:?}",
                    self.id, rel.source
                )));
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Debate> {
        let raw: RawDebate = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let debate = raw.into_debate()?;
        debate.validate()?;
        Ok(debate)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("debate serialization is infallible")
    }

    pub fn adu(&self, id: &str) -> Option<&Adu> {
        self.adus.iter().find(|a| a.id == id)
    }

    pub fn adu_index(&self) -> BTreeMap<&str, &Adu> {
        self.adus.iter().map(|a| (a.id.as_str(), a)).collect()
    }

    pub fn word_count(&self) -> usize {
        self.adus
            .iter()
            .map(|a| a.text.split_whitespace().count())
            .sum()
    }
}

pub fn load_debate(path: impl AsRef<Path>) -> Result<Debate> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Debate::from_json_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_debate(debate: &Debate, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = debate.to_json_string();
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Every `*.json` file directly inside `dir`, sorted by file name.
pub fn corpus_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads every debate in a corpus directory. Debate ids must be unique.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<Debate>> {
    let debates = corpus_files(dir)?
        .iter()
        .map(load_debate)
        .collect::<Result<Vec<_>>>()?;
    let mut ids = HashSet::new();
    for d in &debates {
        if !ids.insert(d.id.as_str()) {
            return Err(Error::Validation(format!("duplicate debate id {:?}", d.id)));
        }
    }
    Ok(debates)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub debates: usize,
    pub adus: usize,
    pub words: usize,
    pub relations: usize,
    pub favour_wins: usize,
    pub against_wins: usize,
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "debates:   {}", self.debates)?;
        writeln!(f, "ADUs:      {}", self.adus)?;
        writeln!(f, "words:     {}", self.words)?;
        writeln!(f, "relations: {}", self.relations)?;
        write!(
            f,
            "winners:   {} favour / {} against",
            self.favour_wins, self.against_wins
        )
    }
}

pub fn corpus_stats(debates: &[Debate]) -> StatsReport {
    debates.iter().fold(StatsReport::default(), |mut acc, d| {
        acc.debates += 1;
        acc.adus += d.adus.len();
        acc.words += d.word_count();
        acc.relations += d.relations.len();
        match d.winner {
            Stance::Favour => acc.favour_wins += 1,
            Stance::Against => acc.against_wins += 1,
        }
        acc
    })
}
