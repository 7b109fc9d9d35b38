//! Exhaustive subset scan; ground truth for the optimized enumerators.

use super::{canonical_order, ArgSet, Semantics};
use crate::error::{Error, Result};
use crate::framework::ArgumentationFramework;

pub const BRUTE_FORCE_MAX_ARGUMENTS: usize = 20;

/// Scans all 2^n subsets, keeps those satisfying the semantics' defining
/// property, then keeps the inclusion-maximal ones.
pub fn brute_force_extensions(
    af: &ArgumentationFramework,
    semantics: Semantics,
) -> Result<Vec<ArgSet>> {
    let n = af.len();
    if n > BRUTE_FORCE_MAX_ARGUMENTS {
        return Err(Error::ResourceLimit(format!(
            "brute force is capped at {BRUTE_FORCE_MAX_ARGUMENTS} arguments, got {n}"
        )));
    }
    // attacks_out[i]: bitmask of arguments i attacks; attacks_in[i]: of its attackers.
    let mut attacks_out = vec![0u32; n];
    let mut attacks_in = vec![0u32; n];
    for &(a, b) in af.attacks() {
        attacks_out[a] |= 1 << b;
        attacks_in[b] |= 1 << a;
    }
    let members = |s: u32| (0..n).filter(move |&i| s & (1 << i) != 0);
    let conflict_free = |s: u32| members(s).all(|i| attacks_out[i] & s == 0);
    let admissible = |s: u32| {
        conflict_free(s)
            && members(s).all(|i| {
                (0..n)
                    .filter(|&k| attacks_in[i] & (1 << k) != 0)
                    .all(|k| attacks_in[k] & s != 0)
            })
    };

    let mut qualifying: Vec<u32> = (0..(1u32 << n))
        .filter(|&s| match semantics {
            Semantics::Naive => conflict_free(s),
            Semantics::Preferred => admissible(s),
        })
        .collect();
    // Any strict superset is larger, so it is seen first.
    qualifying.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
    let mut maximal: Vec<u32> = Vec::new();
    for s in qualifying {
        if !maximal.iter().any(|&m| s & m == s) {
            maximal.push(s);
        }
    }
    Ok(canonical_order(
        maximal.into_iter().map(|s| members(s).collect()).collect(),
    ))
}
