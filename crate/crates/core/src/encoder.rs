//! Encoding of an annotated debate graph into an abstract argumentation framework.
//!
//! Conflict relations are set aside, the remaining inference/rephrase graph
//! is split into weakly-connected components, every component becomes one
//! abstract argument, and each conflict `u -> v` is lifted to an attack
//! `arg(u) -> arg(v)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{ArgId, ArgumentationFramework};
use crate::model::{Debate, RelationKind, Stance};

/// A group of ADUs forming one line of reasoning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractArgument {
    pub id: ArgId,
    /// Member ADU ids, sorted.
    pub adu_ids: Vec<String>,
    pub stance: Stance,
}

/// The framework of one debate together with the ADU groups behind each argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebateFramework {
    pub debate_id: String,
    pub winner: Stance,
    pub arguments: Vec<AbstractArgument>,
    pub af: ArgumentationFramework,
}

impl DebateFramework {
    pub fn stances(&self) -> Vec<Stance> {
        self.arguments.iter().map(|a| a.stance).collect()
    }

    pub fn summary(&self) -> AfSummary {
        AfSummary::of(&self.af, Some(&self.stances()))
    }

    /// ADU id to the argument containing it.
    pub fn argument_of(&self) -> HashMap<&str, ArgId> {
        self.arguments
            .iter()
            .flat_map(|arg| arg.adu_ids.iter().map(move |adu| (adu.as_str(), arg.id)))
            .collect()
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Encodes a validated debate.
///
/// Arguments are numbered by the lexicographically smallest ADU id they
/// contain. A component whose members disagree on stance takes the majority
/// stance; an exact tie is an error.
pub fn encode_af(debate: &Debate) -> Result<DebateFramework> {
    let index: HashMap<&str, usize> = debate
        .adus
        .iter()
        .enumerate()
        .map(|(i, a)| (a.id.as_str(), i))
        .collect();
    let lookup = |id: &str| {
        index.get(id).copied().ok_or_else(|| {
            Error::Validation(format!(
                "debate {}: relation endpoint {id:?} does not name an ADU",
                debate.id
            ))
        })
    };

    let mut sets = DisjointSets::new(debate.adus.len());
    let mut conflicts = Vec::new();
    for rel in &debate.relations {
        let (s, t) = (lookup(&rel.source)?, lookup(&rel.target)?);
        match rel.kind {
            RelationKind::Conflict => conflicts.push((s, t)),
            RelationKind::Inference | RelationKind::Rephrase => sets.union(s, t),
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..debate.adus.len() {
        groups.entry(sets.find(i)).or_default().push(i);
    }
    let mut components: Vec<Vec<&str>> = groups
        .into_values()
        .map(|members| {
            let mut ids: Vec<&str> = members
                .iter()
                .map(|&i| debate.adus[i].id.as_str())
                .collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    components.sort_unstable_by(|a, b| a[0].cmp(b[0]));

    let mut component_of = vec![0usize; debate.adus.len()];
    let mut arguments = Vec::with_capacity(components.len());
    for (arg_id, members) in components.iter().enumerate() {
        let mut favour = 0;
        let mut against = 0;
        for id in members {
            let i = index[id];
            component_of[i] = arg_id;
            match debate.adus[i].stance {
                Stance::Favour => favour += 1,
                Stance::Against => against += 1,
            }
        }
        let stance = match favour.cmp(&against) {
            std::cmp::Ordering::Greater => Stance::Favour,
            std::cmp::Ordering::Less => Stance::Against,
            std::cmp::Ordering::Equal => {
                return Err(Error::StanceTie {
                    component: arg_id,
                    favour,
                    against,
                })
            }
        };
        arguments.push(AbstractArgument {
            id: arg_id,
            adu_ids: members.iter().map(|s| s.to_string()).collect(),
            stance,
        });
    }

    let attacks: BTreeSet<(ArgId, ArgId)> = conflicts
        .into_iter()
        .map(|(s, t)| (component_of[s], component_of[t]))
        .collect();
    let af = ArgumentationFramework::with_indexed_names(arguments.len(), attacks)?;
    Ok(DebateFramework {
        debate_id: debate.id.clone(),
        winner: debate.winner,
        arguments,
        af,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AfSummary {
    pub arguments: usize,
    pub attacks: usize,
    pub favour_arguments: usize,
    pub against_arguments: usize,
    pub self_attacks: usize,
}

impl AfSummary {
    pub fn of(af: &ArgumentationFramework, stances: Option<&[Stance]>) -> AfSummary {
        let (favour, against) = stances.map_or((0, 0), |s| {
            let favour = s.iter().filter(|&&x| x == Stance::Favour).count();
            (favour, s.len() - favour)
        });
        AfSummary {
            arguments: af.len(),
            attacks: af.attacks().len(),
            favour_arguments: favour,
            against_arguments: against,
            self_attacks: af.self_attackers().count(),
        }
    }
}

impl fmt::Display for AfSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|A|={} |R|={} favour={} against={} self-attacks={}",
            self.arguments,
            self.attacks,
            self.favour_arguments,
            self.against_arguments,
            self.self_attacks
        )
    }
}

pub fn af_summary(af: &DebateFramework) -> AfSummary {
    af.summary()
}
