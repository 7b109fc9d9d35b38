use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;

fn af(n: usize, attacks: &[(usize, usize)]) -> ArgumentationFramework {
    ArgumentationFramework::with_indexed_names(n, attacks.iter().copied()).unwrap()
}

fn sets(list: &[&[usize]]) -> Vec<ArgSet> {
    list.iter().map(|s| s.iter().copied().collect()).collect()
}

fn set(items: &[usize]) -> ArgSet {
    items.iter().copied().collect()
}

const CHAIN: &[(usize, usize)] = &[(0, 1), (1, 2)];

#[test]
fn conflict_freeness() {
    let chain = af(3, CHAIN);
    assert!(is_conflict_free(&chain, &BTreeSet::new()).unwrap());
    assert!(!is_conflict_free(&af(2, &[(0, 1)]), &set(&[0, 1])).unwrap());
    assert!(!is_conflict_free(&af(1, &[(0, 0)]), &set(&[0])).unwrap());
    assert!(matches!(
        is_conflict_free(&chain, &set(&[7])),
        Err(Error::UnknownArgument(7))
    ));
}

#[test]
fn admissibility() {
    let chain = af(3, CHAIN);
    assert!(is_admissible(&chain, &BTreeSet::new()).unwrap());
    assert!(!is_admissible(&chain, &set(&[2])).unwrap());
    assert!(is_admissible(&chain, &set(&[0, 2])).unwrap());
    assert!(is_admissible(&chain, &set(&[0])).unwrap());
    assert!(matches!(
        is_admissible(&chain, &set(&[3])),
        Err(Error::UnknownArgument(3))
    ));
}

#[test]
fn naive_fixtures() {
    let lim = SolverLimits::default();
    assert_eq!(
        naive_extensions(&af(3, &[]), lim).unwrap(),
        sets(&[&[0, 1, 2]])
    );
    assert_eq!(
        naive_extensions(&af(3, CHAIN), lim).unwrap(),
        sets(&[&[0, 2], &[1]])
    );
    assert_eq!(
        naive_extensions(&af(1, &[(0, 0)]), lim).unwrap(),
        sets(&[&[]])
    );
    assert_eq!(
        naive_extensions(&af(2, &[(0, 1), (1, 0)]), lim).unwrap(),
        sets(&[&[0], &[1]])
    );
    assert_eq!(naive_extensions(&af(0, &[]), lim).unwrap(), sets(&[&[]]));
}

#[test]
fn preferred_fixtures() {
    let lim = SolverLimits::default();
    assert_eq!(
        preferred_extensions(&af(2, &[(0, 1), (1, 0)]), lim).unwrap(),
        sets(&[&[0], &[1]])
    );
    assert_eq!(
        preferred_extensions(&af(3, CHAIN), lim).unwrap(),
        sets(&[&[0, 2]])
    );
    assert_eq!(
        preferred_extensions(&af(3, &[]), lim).unwrap(),
        sets(&[&[0, 1, 2]])
    );
    assert_eq!(
        preferred_extensions(&af(1, &[(0, 0)]), lim).unwrap(),
        sets(&[&[]])
    );
    // odd cycle: only the empty set is admissible
    assert_eq!(
        preferred_extensions(&af(3, &[(0, 1), (1, 2), (2, 0)]), lim).unwrap(),
        sets(&[&[]])
    );
}

#[test]
fn brute_force_fixtures() {
    let mutual = af(2, &[(0, 1), (1, 0)]);
    assert_eq!(
        brute_force_extensions(&mutual, Semantics::Naive).unwrap(),
        sets(&[&[0], &[1]])
    );
    assert_eq!(
        brute_force_extensions(&af(0, &[]), Semantics::Naive).unwrap(),
        sets(&[&[]])
    );
    assert_eq!(
        brute_force_extensions(&af(0, &[]), Semantics::Preferred).unwrap(),
        sets(&[&[]])
    );
    assert!(matches!(
        brute_force_extensions(&af(21, &[]), Semantics::Naive),
        Err(Error::ResourceLimit(_))
    ));
}

#[test]
fn extension_cap_is_reported() {
    // 8 disjoint mutual attacks have 256 naive extensions.
    let attacks: Vec<_> = (0..8)
        .flat_map(|i| [(2 * i, 2 * i + 1), (2 * i + 1, 2 * i)])
        .collect();
    let big = af(16, &attacks);
    let lim = SolverLimits {
        max_extensions: 100,
        timeout: None,
    };
    assert!(matches!(
        naive_extensions(&big, lim),
        Err(Error::ResourceLimit(_))
    ));
    assert!(matches!(
        preferred_extensions(&big, lim),
        Err(Error::ResourceLimit(_))
    ));
    assert_eq!(
        naive_extensions(&big, SolverLimits::default())
            .unwrap()
            .len(),
        256
    );
}

fn arb_af(max_n: usize) -> impl Strategy<Value = ArgumentationFramework> {
    (
        0..=max_n,
        prop_oneof![Just(0.1), Just(0.3), Just(0.5)],
        any::<u64>(),
    )
        .prop_map(|(n, p, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut attacks = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if rng.random_bool(p) {
                        attacks.push((a, b));
                    }
                }
            }
            ArgumentationFramework::with_indexed_names(n, attacks).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn enumerators_match_brute_force(af in arb_af(10)) {
        let lim = SolverLimits::unlimited();
        prop_assert_eq!(
            naive_extensions(&af, lim).unwrap(),
            brute_force_extensions(&af, Semantics::Naive).unwrap()
        );
        prop_assert_eq!(
            preferred_extensions(&af, lim).unwrap(),
            brute_force_extensions(&af, Semantics::Preferred).unwrap()
        );
    }

    #[test]
    fn structural_properties(af in arb_af(10)) {
        let lim = SolverLimits::unlimited();
        let naive = naive_extensions(&af, lim).unwrap();
        let preferred = preferred_extensions(&af, lim).unwrap();
        prop_assert!(!naive.is_empty());
        prop_assert!(!preferred.is_empty());
        for (list, check_admissible) in [(&naive, false), (&preferred, true)] {
            for (i, s) in list.iter().enumerate() {
                prop_assert!(is_conflict_free(&af, s).unwrap());
                if check_admissible {
                    prop_assert!(is_admissible(&af, s).unwrap());
                }
                // subsets of conflict-free sets stay conflict-free
                for drop in s {
                    let mut smaller = s.clone();
                    smaller.remove(drop);
                    prop_assert!(is_conflict_free(&af, &smaller).unwrap());
                }
                for (j, t) in list.iter().enumerate() {
                    if i != j {
                        prop_assert!(!s.is_subset(t));
                    }
                }
            }
        }
        for p in &preferred {
            prop_assert!(naive.iter().any(|n| p.is_subset(n)));
        }
        for a in 0..af.len() {
            if af.attackers_of(a).is_empty() {
                prop_assert!(is_admissible(&af, &set(&[a])).unwrap());
            }
        }
    }
}
