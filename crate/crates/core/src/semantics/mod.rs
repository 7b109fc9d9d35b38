//! Extension-based semantics: conflict-freeness, admissibility, and
//! enumeration of Naïve and Preferred extensions.

mod brute;
mod naive;
mod preferred;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::encoder::DebateFramework;
use crate::error::{Error, Result};
use crate::framework::{ArgId, ArgumentationFramework};

pub use brute::{brute_force_extensions, BRUTE_FORCE_MAX_ARGUMENTS};
pub use naive::naive_extensions;
pub use preferred::preferred_extensions;

pub type ArgSet = BTreeSet<ArgId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Naive,
    Preferred,
}

impl Semantics {
    pub fn name(self) -> &'static str {
        match self {
            Semantics::Naive => "naive",
            Semantics::Preferred => "preferred",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" | "naïve" => Ok(Semantics::Naive),
            "preferred" => Ok(Semantics::Preferred),
            other => Err(Error::Config(format!("unknown semantics {other:?}"))),
        }
    }
}

/// One acceptable set of arguments of a debate's framework.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub debate_id: String,
    pub semantics: Semantics,
    pub arguments: ArgSet,
}

/// Caps that turn exponential blowup into an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    pub max_extensions: usize,
    pub timeout: Option<Duration>,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_extensions: 100_000,
            timeout: Some(Duration::from_secs(60)),
        }
    }
}

impl SolverLimits {
    pub fn unlimited() -> Self {
        SolverLimits {
            max_extensions: usize::MAX,
            timeout: None,
        }
    }
}

/// Running budget shared by the enumerators.
pub(crate) struct Budget {
    limits: SolverLimits,
    started: Instant,
    steps: u64,
}

impl Budget {
    pub(crate) fn new(limits: SolverLimits) -> Self {
        Budget {
            limits,
            started: Instant::now(),
            steps: 0,
        }
    }

    pub(crate) fn step(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps.is_multiple_of(1024) {
            if let Some(limit) = self.limits.timeout {
                if self.started.elapsed() > limit {
                    return Err(Error::ResourceLimit(format!(
                        "enumeration exceeded {:.1} s",
                        limit.as_secs_f64()
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn found(&self, count: usize) -> Result<()> {
        if count > self.limits.max_extensions {
            return Err(Error::ResourceLimit(format!(
                "more than {} extensions",
                self.limits.max_extensions
            )));
        }
        Ok(())
    }
}

/// True iff no member attacks a member (itself included).
pub fn is_conflict_free(af: &ArgumentationFramework, set: &ArgSet) -> Result<bool> {
    af.check_ids(set)?;
    Ok(set
        .iter()
        .all(|&a| af.attacked_by(a).iter().all(|b| !set.contains(b))))
}

/// True iff the set is conflict-free and counter-attacks every attacker of its members.
pub fn is_admissible(af: &ArgumentationFramework, set: &ArgSet) -> Result<bool> {
    if !is_conflict_free(af, set)? {
        return Ok(false);
    }
    Ok(set.iter().all(|&a| {
        af.attackers_of(a)
            .iter()
            .all(|&k| af.attackers_of(k).iter().any(|d| set.contains(d)))
    }))
}

/// Enumerates extensions of `af` under `semantics`, in canonical order.
pub fn extensions(
    af: &ArgumentationFramework,
    semantics: Semantics,
    limits: SolverLimits,
) -> Result<Vec<ArgSet>> {
    match semantics {
        Semantics::Naive => naive_extensions(af, limits),
        Semantics::Preferred => preferred_extensions(af, limits),
    }
}

/// Enumerates extensions of a debate's framework, tagged with the debate id.
pub fn solve_debate(
    df: &DebateFramework,
    semantics: Semantics,
    limits: SolverLimits,
) -> Result<Vec<Extension>> {
    let sets = extensions(&df.af, semantics, limits).map_err(|e| match e {
        Error::ResourceLimit(msg) => {
            Error::ResourceLimit(format!("debate {}: {msg}", df.debate_id))
        }
        other => other,
    })?;
    Ok(sets
        .into_iter()
        .map(|arguments| Extension {
            debate_id: df.debate_id.clone(),
            semantics,
            arguments,
        })
        .collect())
}

pub(crate) fn canonical_order(mut sets: Vec<ArgSet>) -> Vec<ArgSet> {
    sets.sort();
    sets
}

#[cfg(test)]
mod tests;
