//! Property tests for the term layer and the rewrite engine.

mod common;

use afcalc_core::grammar::{parse_canonical, print_term};
use afcalc_core::rewrite::{normalize, RewriteConfig};
use afcalc_core::term::{canonicalize, collapse_aliases, Term};
use common::random_term;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use std::cmp::Ordering;
use std::collections::BTreeMap;

fn term_strategy() -> impl Strategy<Value = Term> {
    (any::<u64>(), 1usize..=5).prop_map(|(seed, depth)| {
        let mut rng = StdRng::seed_from_u64(seed);
        random_term(&mut rng, depth)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonicalize_is_idempotent(t in term_strategy()) {
        let once = canonicalize(&t);
        let twice = canonicalize(&once);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn canonicalize_preserves_atom_multiset(t in term_strategy()) {
        prop_assert_eq!(t.atom_names(), canonicalize(&t).atom_names());
    }

    #[test]
    fn collapse_commutes_with_canonicalize(t in term_strategy()) {
        let mut aliases = BTreeMap::new();
        aliases.insert("y".to_string(), "v".to_string());
        let collapsed_then = collapse_aliases(&t, &aliases).unwrap();
        let canon_then = collapse_aliases(&canonicalize(&t), &aliases).unwrap();
        prop_assert_eq!(collapsed_then, canon_then);
    }

    #[test]
    fn order_is_total_and_antisymmetric(a in term_strategy(), b in term_strategy()) {
        let (a, b) = (canonicalize(&a), canonicalize(&b));
        match a.cmp(&b) {
            Ordering::Equal => prop_assert_eq!(&a, &b),
            Ordering::Less => prop_assert_eq!(b.cmp(&a), Ordering::Greater),
            Ordering::Greater => prop_assert_eq!(b.cmp(&a), Ordering::Less),
        }
    }

    #[test]
    fn order_is_transitive(a in term_strategy(), b in term_strategy(), c in term_strategy()) {
        let mut v = [canonicalize(&a), canonicalize(&b), canonicalize(&c)];
        v.sort();
        prop_assert!(v[0] <= v[1] && v[1] <= v[2] && v[0] <= v[2]);
    }

    #[test]
    fn cross_argument_permutations_canonicalize_identically(
        seed in any::<u64>(), n in 2usize..=3
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let args: Vec<Term> = (0..n).map(|_| random_term(&mut rng, 2)).collect();
        let mut rev = args.clone();
        rev.reverse();
        let a = Term::Cross { n, func: common::unary("F"), args };
        let b = Term::Cross { n, func: common::unary("F"), args: rev };
        prop_assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn printed_normal_forms_reparse(t in term_strategy()) {
        // Round-trip: every emitted serialization re-parses to the same
        // canonical term. Random terms use only grammar-expressible shapes.
        if let Ok(n) = normalize(&t, &RewriteConfig::default()) {
            for atom in &n.nf.atoms {
                let printed = print_term(atom);
                let back = parse_canonical(&printed).unwrap();
                prop_assert_eq!(&back, atom);
            }
        }
    }

    #[test]
    fn json_round_trips_terms(t in term_strategy()) {
        let t = canonicalize(&t);
        let json = serde_json::to_string(&t).unwrap();
        let back: Term = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn normalization_is_idempotent(t in term_strategy()) {
        if let Ok(n) = normalize(&t, &RewriteConfig::default()) {
            let again = normalize(&n.nf.as_term(), &RewriteConfig::default()).unwrap();
            prop_assert_eq!(n.nf.atoms, again.nf.atoms);
        }
    }

    #[test]
    fn atoms_of_normal_forms_are_atomic(t in term_strategy()) {
        // Summands whose full expansion exceeds the splitting budget keep
        // their sums; everything else must reach an atomic shape.
        if let Ok(n) = normalize(&t, &RewriteConfig::default()) {
            for atom in &n.nf.atoms {
                prop_assert!(
                    atom.is_atomic_summand()
                        || afcalc_core::rewrite::exceeds_split_budget(atom),
                    "non-atomic result {atom:?}"
                );
            }
        }
    }

    #[test]
    fn zero_slots_annihilate(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let filler = random_term(&mut rng, 2);
        let t = Term::Cross {
            n: 2,
            func: common::unary("F"),
            args: vec![Term::Zero, filler],
        };
        let n = normalize(&t, &RewriteConfig::default()).unwrap();
        prop_assert!(n.nf.atoms.is_empty());
    }
}
