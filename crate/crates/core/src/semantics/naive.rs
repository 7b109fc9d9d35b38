//! Naïve extensions as maximal independent sets of the symmetrized attack
//! graph, enumerated Bron–Kerbosch style with pivoting.

use fixedbitset::FixedBitSet;

use super::{canonical_order, ArgSet, Budget, SolverLimits};
use crate::error::Result;
use crate::framework::ArgumentationFramework;

struct Enumerator<'a> {
    /// Closed neighbourhood in the symmetrized attack graph.
    closed: Vec<FixedBitSet>,
    budget: Budget,
    out: &'a mut Vec<ArgSet>,
}

impl Enumerator<'_> {
    fn expand(
        &mut self,
        chosen: &mut Vec<usize>,
        p: FixedBitSet,
        mut x: FixedBitSet,
    ) -> Result<()> {
        self.budget.step()?;
        if p.is_clear() {
            if x.is_clear() {
                self.out.push(chosen.iter().copied().collect());
                self.budget.found(self.out.len())?;
            }
            return Ok(());
        }
        // Pivot maximizing |P \ N[u]|, i.e. the candidates it lets us skip.
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| p.difference_count(&self.closed[u]))
            .expect("p is non-empty");
        let mut branch = p.clone();
        branch.intersect_with(&self.closed[pivot]);
        let mut p = p;
        for v in branch.ones() {
            let mut next_p = p.clone();
            next_p.difference_with(&self.closed[v]);
            let mut next_x = x.clone();
            next_x.difference_with(&self.closed[v]);
            chosen.push(v);
            self.expand(chosen, next_p, next_x)?;
            chosen.pop();
            p.set(v, false);
            x.insert(v);
        }
        Ok(())
    }
}

/// Inclusion-maximal conflict-free sets, in canonical order.
///
/// Self-attacking arguments belong to no conflict-free set and are removed
/// before the search; if every argument attacks itself the only extension is ∅.
pub fn naive_extensions(af: &ArgumentationFramework, limits: SolverLimits) -> Result<Vec<ArgSet>> {
    let n = af.len();
    let mut closed = vec![FixedBitSet::with_capacity(n); n];
    for (v, row) in closed.iter_mut().enumerate() {
        row.insert(v);
        row.extend(af.attacked_by(v).iter().copied());
        row.extend(af.attackers_of(v).iter().copied());
    }
    let mut candidates = FixedBitSet::with_capacity(n);
    candidates.extend((0..n).filter(|&v| !af.is_self_attacking(v)));

    let mut out = Vec::new();
    let mut enumerator = Enumerator {
        closed,
        budget: Budget::new(limits),
        out: &mut out,
    };
    enumerator.expand(&mut Vec::new(), candidates, FixedBitSet::with_capacity(n))?;
    Ok(canonical_order(out))
}
