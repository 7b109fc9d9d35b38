//! Preferred extensions by labelling-based backtracking search.
//!
//! Each argument carries one of five labels. Choosing a blank argument as
//! `In` makes everything it attacks `Out` and every attacker not yet `Out`
//! `MustOut` (it still has to be counter-attacked). A branch dies as soon as
//! some `MustOut` argument has no blank attacker left to defeat it. At a
//! leaf with no `MustOut` labels the `In` set is admissible; it is kept
//! unless it is contained in an extension already found. The search visits
//! the `In` branch of every decision before the `Undec` branch, so later
//! leaves are never strict supersets of earlier ones.

use super::{canonical_order, ArgSet, Budget, SolverLimits};
use crate::error::Result;
use crate::framework::{ArgId, ArgumentationFramework};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Blank,
    In,
    Out,
    MustOut,
    Undec,
}

struct Search<'a> {
    af: &'a ArgumentationFramework,
    budget: Budget,
    found: Vec<ArgSet>,
}

impl Search<'_> {
    fn hopeless(&self, labels: &[Label]) -> bool {
        labels.iter().enumerate().any(|(x, &l)| {
            l == Label::MustOut
                && !self
                    .af
                    .attackers_of(x)
                    .iter()
                    .any(|&z| labels[z] == Label::Blank)
        })
    }

    fn select(&self, labels: &[Label]) -> Option<ArgId> {
        let blank = || (0..labels.len()).filter(|&y| labels[y] == Label::Blank);
        // Unchallenged arguments first, then the one defeating the most live arguments.
        blank()
            .find(|&y| {
                self.af
                    .attackers_of(y)
                    .iter()
                    .all(|&z| labels[z] == Label::Out)
            })
            .or_else(|| {
                blank().max_by_key(|&y| {
                    let hits = self
                        .af
                        .attacked_by(y)
                        .iter()
                        .filter(|&&z| matches!(labels[z], Label::Blank | Label::MustOut))
                        .count();
                    (hits, std::cmp::Reverse(y))
                })
            })
    }

    fn set_in(&self, labels: &mut [Label], y: ArgId) {
        labels[y] = Label::In;
        for &z in self.af.attacked_by(y) {
            labels[z] = Label::Out;
        }
        for &z in self.af.attackers_of(y) {
            if labels[z] != Label::Out {
                labels[z] = Label::MustOut;
            }
        }
    }

    fn run(&mut self, mut labels: Vec<Label>) -> Result<()> {
        self.budget.step()?;
        loop {
            if self.hopeless(&labels) {
                return Ok(());
            }
            let Some(y) = self.select(&labels) else { break };
            let mut child = labels.clone();
            self.set_in(&mut child, y);
            self.run(child)?;
            labels[y] = Label::Undec;
        }
        if labels.contains(&Label::MustOut) {
            return Ok(());
        }
        let set: ArgSet = (0..labels.len())
            .filter(|&i| labels[i] == Label::In)
            .collect();
        if !self.found.iter().any(|t| set.is_subset(t)) {
            self.found.push(set);
            self.budget.found(self.found.len())?;
        }
        Ok(())
    }
}

/// Inclusion-maximal admissible sets, in canonical order.
pub fn preferred_extensions(
    af: &ArgumentationFramework,
    limits: SolverLimits,
) -> Result<Vec<ArgSet>> {
    let labels = (0..af.len())
        .map(|a| {
            if af.is_self_attacking(a) {
                Label::Undec
            } else {
                Label::Blank
            }
        })
        .collect();
    let mut search = Search {
        af,
        budget: Budget::new(limits),
        found: Vec::new(),
    };
    search.run(labels)?;
    Ok(canonical_order(search.found))
}
