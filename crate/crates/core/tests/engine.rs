//! End-to-end tests of the rewrite engine against worked examples.

use afcalc_core::calculus::{pairing_group_sizes, verify_chain_rule, Verdict};
use afcalc_core::grammar::{parse_canonical, print_term};
use afcalc_core::rewrite::{normalize, replay_trace, RewriteConfig, RuleId};
use afcalc_core::term::{canonicalize, Func, FunctorAtom, Term};

fn nf_strings(input: &str) -> Vec<String> {
    let t = parse_canonical(input).unwrap();
    let n = normalize(&t, &RewriteConfig::default()).unwrap();
    n.nf.atoms.iter().map(print_term).collect()
}

fn nf_of(input: &str) -> Vec<Term> {
    let t = parse_canonical(input).unwrap();
    normalize(&t, &RewriteConfig::default()).unwrap().nf.atoms
}

fn same_nf(a: &str, b: &str) {
    assert_eq!(nf_of(a), nf_of(b), "normal forms of `{a}` and `{b}` differ");
}

#[test]
fn zero_slot_annihilates() {
    assert!(nf_of("cr2 F(0, x)").is_empty());
    assert!(nf_of("cr3 F(x, 0, y)").is_empty());
}

#[test]
fn slot_sum_splits_three_ways() {
    // cr2 F(x ⊕ y, z) = cr2 F(x, z) ⊕ cr2 F(y, z) ⊕ cr3 F(x, y, z)
    same_nf(
        "cr2 F(x + y, z)",
        "cr2 F(x, z) + cr2 F(y, z) + cr3 F(x, y, z)",
    );
}

#[test]
fn unreduced_application_in_slot_splits() {
    // cr2 F(a, G(x)) = cr2 F(a, G(0)) ⊕ cr2 F(a, cr1 G(x)) ⊕ cr3 F(a, G(0), cr1 G(x))
    same_nf(
        "cr2 F(a, G(x))",
        "cr2 F(a, G0) + cr2 F(a, cr1 G(x)) + cr3 F(a, G0, cr1 G(x))",
    );
}

#[test]
fn composite_unary_cross_effect() {
    // cr1(F∘G)(x) = cr1 F(cr1 G(x)) ⊕ cr2 F(cr1 G(x), G(0))
    same_nf("cr1 (F o G)(x)", "cr1 F(cr1 G(x)) + cr2 F(cr1 G(x), G0)");
}

#[test]
fn composite_cross_effect_expands_to_ten_cover_summands() {
    let atoms = nf_of("cr2 (F o G)(x1, x2)");
    assert_eq!(atoms.len(), 10);
    let expect = nf_of(
        "cr1 F(cr2 G(x1, x2)) + cr2 F(cr2 G(x1, x2), G0) + cr2 F(cr1 G(x1), cr1 G(x2)) \
         + cr2 F(cr1 G(x1), cr2 G(x1, x2)) + cr2 F(cr1 G(x2), cr2 G(x1, x2)) \
         + cr3 F(cr1 G(x1), cr1 G(x2), G0) + cr3 F(cr1 G(x1), cr2 G(x1, x2), G0) \
         + cr3 F(cr1 G(x2), cr2 G(x1, x2), G0) + cr3 F(cr1 G(x1), cr1 G(x2), cr2 G(x1, x2)) \
         + cr4 F(cr1 G(x1), cr1 G(x2), cr2 G(x1, x2), G0)",
    );
    assert_eq!(atoms, expect);
}

#[test]
fn identity_inner_functor_collapses() {
    // cr2(F∘Id)(x1,x2) = cr2 F(x1,x2) after zero annihilation
    same_nf("cr2 (F o Id)(x1, x2)", "cr2 F(x1, x2)");
}

#[test]
fn linearization_distributes_over_sums() {
    same_nf(
        "D1[v] (cr1 F(v) + cr2 F(v, x))",
        "D1[v] cr1 F(v) + D1[v] cr2 F(v, x)",
    );
}

#[test]
fn linearization_of_constant_vanishes() {
    assert!(nf_of("D1[v] cr2 F(x, w)").is_empty());
}

#[test]
fn slotwise_linearization_distributes() {
    // D1^w cr2 F(D1 G(w) ⊕ D1 cr2 G(w, x), G(0)) splits into the two summands.
    same_nf(
        "D1[w] cr2 F(D1[w] G(w) + D1[w] cr2 G(w, x), G0)",
        "D1[w] cr2 F(D1[w] G(w), G0) + D1[w] cr2 F(D1[w] cr2 G(w, x), G0)",
    );
}

#[test]
fn diagonal_contraction_kills_multilinear_diagonals() {
    assert!(nf_of("D1[x2] cr2 F(cr1 G(x2), cr2 G(x1, x2))").is_empty());
    assert!(nf_of("D1[v] cr2 F(cr1 G(v), cr1 G(v))").is_empty());
    // A single marked slot does not contract.
    assert_eq!(nf_of("D1[v] cr2 F(cr1 G(v), cr1 G(x))").len(), 1);
}

#[test]
fn composition_rules_push_markers_inward() {
    // Lemma-style: D1(F∘G)(w) = D1 F(D1 G(w)) ⊕ D1 cr2 F(cr1 G(w)→D1 G(w), G(0))
    let atoms = nf_strings("D1[w] (F o G)(w)");
    assert_eq!(
        atoms,
        vec![
            "D1[w] F(D1[w] G(w))".to_string(),
            "D1[w] cr2 F(G(0), D1[w] G(w))".to_string(),
        ]
    );
    // Reduced inner functor: no correction term.
    same_nf(
        "D1[w] cr2 F(cr2 G(w, x), G0)",
        "D1[w] cr2 F(D1[w] cr2 G(w, x), G0)",
    );
    same_nf("D1[w] cr1 F(cr2 G(w, x))", "D1[w] F(D1[w] cr2 G(w, x))");
}

#[test]
fn idempotent_collapses() {
    // D1 cr1 F(t) = D1 F(t), and iterated markers collapse to one.
    same_nf("D1[v] cr1 F(v)", "D1[v] F(v)");
    same_nf("D1[v] D1[v] F(v)", "D1[v] F(v)");
    same_nf("D1[v] D1[v] cr1 F(v)", "D1[v] F(v)");
}

#[test]
fn normalize_is_idempotent_on_its_output() {
    let t = parse_canonical("delta2 (F o G)(w, v; x)").unwrap();
    let n = normalize(&t, &RewriteConfig::default()).unwrap();
    let reified = n.nf.as_term();
    let again = normalize(&reified, &RewriteConfig::default()).unwrap();
    assert_eq!(n.nf.atoms, again.nf.atoms);
}

#[test]
fn traces_replay() {
    for input in [
        "cr2 (F o G)(x1, x2)",
        "delta2 (F o G)(w, v; x)",
        "D1[w] cr2 F(G(w), cr1 G(x))",
    ] {
        let t = parse_canonical(input).unwrap();
        let n = normalize(&t, &RewriteConfig::default()).unwrap();
        let replayed = replay_trace(&t, &n.nf.trace).expect("trace replays");
        assert_eq!(replayed, n.nf.atoms, "replay of `{input}`");
    }
}

#[test]
fn nabla_examples() {
    // ∇F(v;x) = D1 F(v) ⊕ D1 cr2 F(v, x)
    same_nf("nabla F(v; x)", "D1[v] F(v) + D1[v] cr2 F(v, x)");
    // Zero basepoint: the second summand annihilates.
    same_nf("nabla F(v; 0)", "D1[v] F(v)");
    // Identity: vanishing second cross effect.
    same_nf("nabla Id(v; x)", "D1[v] v");
}

#[test]
fn delta_examples() {
    same_nf("delta0 F(x)", "F(x)");
    same_nf("delta1 F(v; 0)", "D1[v] F(v)");
    let atoms = nf_strings("delta2 F(w, v; x)");
    assert_eq!(
        atoms,
        vec![
            "D1[v] D1[vbar] cr2 F(v, vbar)".to_string(),
            "D1[v] D1[vbar] cr3 F(v, vbar, x)".to_string(),
            "D1[w] F(w)".to_string(),
            "D1[w] cr2 F(w, x)".to_string(),
        ]
    );
}

#[test]
fn order_one_chain_rule_has_eight_atoms_per_side() {
    let f = Func::atom(FunctorAtom::abstract_unary("F"));
    let g = Func::atom(FunctorAtom::abstract_unary("G"));
    let report = verify_chain_rule(1, &f, &g, &RewriteConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Equal);
    assert_eq!(report.lhs_atoms.len(), 8);
    assert_eq!(report.rhs_atoms.len(), 8);
    // Independent oracle: the hand expansion of both sides.
    let expected = nf_of(
        "D1[v] F(D1[v] G(v)) + D1[v] cr2 F(D1[v] G(v), G0) \
         + D1[v] F(D1[v] cr2 G(v, x)) \
         + D1[v] cr2 F(D1[v] cr2 G(v, x), G0) \
         + D1[v] cr2 F(D1[v] G(v), cr1 G(x)) \
         + D1[v] cr2 F(D1[v] cr2 G(v, x), cr1 G(x)) \
         + D1[v] cr3 F(D1[v] G(v), cr1 G(x), G0) \
         + D1[v] cr3 F(D1[v] cr2 G(v, x), cr1 G(x), G0)",
    );
    assert_eq!(report.lhs_atoms, expected);
}

#[test]
fn order_two_chain_rule_verifies_with_pairing() {
    let f = Func::atom(FunctorAtom::abstract_unary("F"));
    let g = Func::atom(FunctorAtom::abstract_unary("G"));
    let report = verify_chain_rule(2, &f, &g, &RewriteConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Equal);
    assert_eq!(report.lhs_pre_split.len(), 31, "pre-split summand count");
    assert_eq!(report.lhs_atoms.len(), 32);
    assert_eq!(report.rhs_atoms.len(), 32);
    assert_eq!(pairing_group_sizes(&report.pairing), [3, 3, 1, 10, 14]);
    // The first summand is the one that splits in two.
    let a1 = report.pairing.iter().find(|p| p.lhs == "A1").unwrap();
    assert_eq!(a1.rhs.len(), 2);
    for p in &report.pairing {
        if p.lhs != "A1" {
            assert_eq!(p.rhs.len(), 1, "{} pairs to one atom", p.lhs);
        }
    }
}

#[test]
fn order_two_with_identity_inner_functor() {
    let f = Func::atom(FunctorAtom::abstract_unary("F"));
    let id = Func::atom(FunctorAtom::identity());
    let report = verify_chain_rule(2, &f, &id, &RewriteConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Equal);
    // All inner cross-effect atoms annihilate; what is left mentions only F.
    for atom in &report.lhs_atoms {
        assert!(atom.atom_names().iter().all(|n| n == "F"), "{atom:?}");
    }
    assert!(report.lhs_atoms.len() < 32);
}

#[test]
fn alpha_invariance_of_the_verdict() {
    let f = Func::atom(FunctorAtom::abstract_unary("K"));
    let g = Func::atom(FunctorAtom::abstract_unary("H"));
    let report = afcalc_core::calculus::verify_chain_rule_with_vars(
        2,
        &f,
        &g,
        "a",
        "b",
        "c",
        &RewriteConfig::default(),
    )
    .unwrap();
    assert_eq!(report.verdict, Verdict::Equal);
    assert_eq!(report.lhs_atoms.len(), 32);
}

#[test]
fn disabling_rules_breaks_the_verification() {
    let f = Func::atom(FunctorAtom::abstract_unary("F"));
    let g = Func::atom(FunctorAtom::abstract_unary("G"));
    for rule in [
        RuleId::R3,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7b,
        RuleId::R8a,
        RuleId::R8b,
    ] {
        let cfg = RewriteConfig::without(rule);
        let report = verify_chain_rule(2, &f, &g, &cfg).unwrap();
        assert_eq!(
            report.verdict,
            Verdict::Mismatch,
            "verification must fail without {rule:?}"
        );
    }
}

#[test]
fn canonical_strings_survive_the_grammar() {
    let t = parse_canonical("delta2 (F o G)(w, v; x)").unwrap();
    let n = normalize(&t, &RewriteConfig::default()).unwrap();
    for atom in &n.nf.atoms {
        let printed = print_term(atom);
        let back = parse_canonical(&printed).unwrap();
        assert_eq!(&back, atom, "round trip of `{printed}`");
    }
    let _ = canonicalize(&t);
}

#[test]
fn named_rule_operations_match_their_examples() {
    use afcalc_core::rewrite::{
        collapse_linearization_idempotents, contract_diagonal, distribute_linearization,
        expand_composite_cross_effect, push_linearization_through_composite, split_sums_and_zeros,
    };
    let canon = |s: &str| parse_canonical(s).unwrap();

    // Cover expansion applies to composites and skips everything else.
    assert_eq!(
        expand_composite_cross_effect(&canon("cr1 (F o G)(x)")),
        Some(canon("cr1 F(cr1 G(x)) + cr2 F(cr1 G(x), G0)"))
    );
    assert_eq!(expand_composite_cross_effect(&canon("cr2 F(v, x)")), None);

    // Splitting sums, zeros, and unreduced applications.
    assert_eq!(
        split_sums_and_zeros(&canon("cr2 F(x + y, z)")),
        canon("cr2 F(x, z) + cr2 F(y, z) + cr3 F(x, y, z)")
    );
    assert_eq!(split_sums_and_zeros(&canon("cr3 F(x, 0, z)")), Term::Zero);
    assert_eq!(
        split_sums_and_zeros(&canon("cr2 F(a, G(x))")),
        canon("cr2 F(a, G0) + cr2 F(a, cr1 G(x)) + cr3 F(a, G0, cr1 G(x))")
    );

    // Marker distribution over sums, and over a marked slot sum.
    assert_eq!(
        distribute_linearization(&canon("D1[v] (cr1 F(v) + cr2 F(v, x))")),
        canon("D1[v] cr1 F(v) + D1[v] cr2 F(v, x)")
    );
    assert_eq!(
        distribute_linearization(&canon("D1[v] cr2 F(x, w)")),
        Term::Zero
    );
    assert_eq!(
        distribute_linearization(&canon("D1[w] cr2 F(D1[w] G(w) + D1[w] cr2 G(w, x), G0)")),
        canon("D1[w] cr2 F(D1[w] G(w), G0) + D1[w] cr2 F(D1[w] cr2 G(w, x), G0)")
    );

    // Diagonal contraction.
    assert_eq!(
        contract_diagonal(&canon("D1[x2] cr2 F(cr1 G(x2), cr2 G(x1, x2))")),
        Term::Zero
    );
    let single = canon("D1[v] cr2 F(cr1 G(v), cr1 G(x))");
    assert_eq!(contract_diagonal(&single), single);

    // Pushing markers through compositions.
    assert_eq!(
        push_linearization_through_composite(&canon("D1[w] cr2 F(cr2 G(w, x), G0)")),
        canon("D1[w] cr2 F(D1[w] cr2 G(w, x), G0)")
    );
    assert_eq!(
        push_linearization_through_composite(&canon("D1[w] cr1 F(cr2 G(w, x))")),
        canon("D1[w] cr1 F(D1[w] cr2 G(w, x))")
    );

    // The idempotent collapses, together and in either order.
    assert_eq!(
        collapse_linearization_idempotents(&canon("D1[v] cr1 F(v)")),
        canon("D1[v] F(v)")
    );
    assert_eq!(
        collapse_linearization_idempotents(&canon("D1[v] D1[v] F(v)")),
        canon("D1[v] F(v)")
    );
    assert_eq!(
        collapse_linearization_idempotents(&canon("D1[v] D1[v] cr1 F(v)")),
        canon("D1[v] F(v)")
    );
}

#[test]
fn the_composed_linearization_atom_appears_exactly_once() {
    let f = Func::atom(FunctorAtom::abstract_unary("F"));
    let g = Func::atom(FunctorAtom::abstract_unary("G"));
    let report = verify_chain_rule(2, &f, &g, &RewriteConfig::default()).unwrap();
    let b1 = parse_canonical("D1[w] F(D1[w] G(w))").unwrap();
    assert_eq!(
        report.lhs_atoms.iter().filter(|a| **a == b1).count(),
        1,
        "D1 F(D1 G(w)) occurs exactly once"
    );
    assert_eq!(report.lhs_atoms.len(), 32);
}
