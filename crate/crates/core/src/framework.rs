//! Dung-style abstract argumentation frameworks.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of an argument inside its framework.
pub type ArgId = usize;

/// Arguments (by name) plus a binary attack relation over them.
///
/// Adjacency lists are built once at construction; the framework is
/// immutable afterwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FrameworkRepr", into = "FrameworkRepr")]
pub struct ArgumentationFramework {
    names: Vec<String>,
    attacks: BTreeSet<(ArgId, ArgId)>,
    attackers: Vec<Vec<ArgId>>,
    attacked: Vec<Vec<ArgId>>,
}

#[derive(Serialize, Deserialize)]
struct FrameworkRepr {
    arguments: Vec<String>,
    attacks: Vec<(ArgId, ArgId)>,
}

impl TryFrom<FrameworkRepr> for ArgumentationFramework {
    type Error = Error;

    fn try_from(repr: FrameworkRepr) -> Result<Self> {
        ArgumentationFramework::new(repr.arguments, repr.attacks)
    }
}

impl From<ArgumentationFramework> for FrameworkRepr {
    fn from(af: ArgumentationFramework) -> Self {
        FrameworkRepr {
            arguments: af.names,
            attacks: af.attacks.into_iter().collect(),
        }
    }
}

impl PartialEq for ArgumentationFramework {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.attacks == other.attacks
    }
}

impl Eq for ArgumentationFramework {}

impl ArgumentationFramework {
    /// Builds a framework; duplicate attacks collapse, duplicate names are rejected.
    pub fn new(
        names: Vec<String>,
        attacks: impl IntoIterator<Item = (ArgId, ArgId)>,
    ) -> Result<Self> {
        let n = names.len();
        let mut unique = HashSet::with_capacity(n);
        for name in &names {
            if !unique.insert(name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate argument name {name:?}"
                )));
            }
        }
        let attacks: BTreeSet<(ArgId, ArgId)> = attacks.into_iter().collect();
        let mut attackers = vec![Vec::new(); n];
        let mut attacked = vec![Vec::new(); n];
        for &(a, b) in &attacks {
            if a >= n {
                return Err(Error::UnknownArgument(a));
            }
            if b >= n {
                return Err(Error::UnknownArgument(b));
            }
            attacked[a].push(b);
            attackers[b].push(a);
        }
        Ok(ArgumentationFramework {
            names,
            attacks,
            attackers,
            attacked,
        })
    }

    /// Framework with arguments named `a0, a1, ...`.
    pub fn with_indexed_names(
        n: usize,
        attacks: impl IntoIterator<Item = (ArgId, ArgId)>,
    ) -> Result<Self> {
        Self::new((0..n).map(|i| format!("a{i}")).collect(), attacks)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: ArgId) -> &str {
        &self.names[id]
    }

    pub fn id_of(&self, name: &str) -> Option<ArgId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn attacks(&self) -> &BTreeSet<(ArgId, ArgId)> {
        &self.attacks
    }

    pub fn attacks_pair(&self, from: ArgId, to: ArgId) -> bool {
        self.attacks.contains(&(from, to))
    }

    pub fn attackers_of(&self, id: ArgId) -> &[ArgId] {
        &self.attackers[id]
    }

    pub fn attacked_by(&self, id: ArgId) -> &[ArgId] {
        &self.attacked[id]
    }

    pub fn is_self_attacking(&self, id: ArgId) -> bool {
        self.attacks.contains(&(id, id))
    }

    pub fn self_attackers(&self) -> impl Iterator<Item = ArgId> + '_ {
        (0..self.len()).filter(|&i| self.is_self_attacking(i))
    }

    /// Name-level view, independent of argument numbering.
    pub fn canonical(&self) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
        let names = self.names.iter().cloned().collect();
        let attacks = self
            .attacks
            .iter()
            .map(|&(a, b)| (self.names[a].clone(), self.names[b].clone()))
            .collect();
        (names, attacks)
    }

    pub fn check_ids(&self, ids: &BTreeSet<ArgId>) -> Result<()> {
        match ids.iter().find(|&&id| id >= self.len()) {
            Some(&bad) => Err(Error::UnknownArgument(bad)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ArgumentationFramework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|A|={} |R|={}", self.len(), self.attacks.len())
    }
}
