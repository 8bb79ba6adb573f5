//! Acceptance suite: one test per criterion, printing a pass line with the
//! measured runtime (visible with `--nocapture`).

mod common;

use afcalc_core::calculus::{pairing_group_sizes, verify_chain_rule, Verdict};
use afcalc_core::concrete::{
    check_rule_concrete, cross_effect_dim, cross_effect_split, linearization_complex, Assignment,
    ConcreteFunctor, Mat,
};
use afcalc_core::grammar::parse_canonical;
use afcalc_core::rewrite::{enumerate_covers, normalize, RewriteConfig, RuleId};
use afcalc_core::term::{Func, FunctorAtom, Term};
use common::random_term;
use rand::rngs::StdRng;
use rand::SeedableRng;
use std::time::{Duration, Instant};

fn f_atom() -> Func {
    Func::atom(FunctorAtom::abstract_unary("F"))
}

fn g_atom() -> Func {
    Func::atom(FunctorAtom::abstract_unary("G"))
}

fn fixture_terms(text: &str) -> Vec<(String, Term)> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            let (label, term) = l.split_once('|').unwrap();
            (
                label.trim().to_string(),
                parse_canonical(term.trim()).unwrap(),
            )
        })
        .collect()
}

fn finish(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "{name} took {elapsed:?}, over the {budget:?} budget"
    );
    println!("acceptance {name}: PASS ({elapsed:?})");
}

/// Criterion 1: cover counts 2, 10, 218 for p = 1, 2, 3, against a brute
/// force over all families of subsets of the power set, in under a second.
#[test]
fn criterion_1_cover_counts() {
    let started = Instant::now();
    let expected = [(1usize, 2usize), (2, 10), (3, 218)];
    for (p, count) in expected {
        let covers = enumerate_covers(p).unwrap();
        assert_eq!(covers.len(), count, "cover count for p = {p}");
        // Independent oracle: filter all families of subsets of P({1..p}).
        let subsets: Vec<u32> = (0u32..(1 << p)).collect();
        let full = (1u32 << p) - 1;
        let mut brute = 0usize;
        for family in 1u64..(1 << subsets.len()) {
            let mut union = 0u32;
            for (i, s) in subsets.iter().enumerate() {
                if family & (1 << i) != 0 {
                    union |= s;
                }
            }
            if union == full {
                brute += 1;
            }
        }
        assert_eq!(brute, count, "brute-force count for p = {p}");
    }
    // The ten covers for p = 2 are exactly the ten summands of the composite
    // second cross effect.
    let atoms = normalize(
        &parse_canonical("cr2 (F o G)(x1, x2)").unwrap(),
        &RewriteConfig::default(),
    )
    .unwrap()
    .nf
    .atoms;
    assert_eq!(atoms.len(), 10);
    finish("1 (cover counts)", started, Duration::from_secs(1));
}

/// Criterion 2: the second-order chain rule verifies: 31 summands before the
/// composite split matching the display fixture item for item, 32 atoms per
/// side, and the pairing in proof-type groups of sizes 3/3/1/10/14, in under
/// five seconds.
#[test]
fn criterion_2_second_order_chain_rule() {
    let started = Instant::now();
    let report = verify_chain_rule(2, &f_atom(), &g_atom(), &RewriteConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Equal);

    let lhs_fixture = fixture_terms(include_str!("../fixtures/lhs_order2.txt"));
    assert_eq!(report.lhs_pre_split.len(), 31);
    let mut expected: Vec<Term> = lhs_fixture.iter().map(|(_, t)| t.clone()).collect();
    expected.sort();
    let mut got = report.lhs_pre_split.clone();
    got.sort();
    assert_eq!(got, expected, "pre-split summands match the display list");

    let rhs_fixture = fixture_terms(include_str!("../fixtures/rhs_order2.txt"));
    assert_eq!(report.lhs_atoms.len(), 32);
    assert_eq!(report.rhs_atoms.len(), 32);
    let mut expected_rhs: Vec<Term> = rhs_fixture.iter().map(|(_, t)| t.clone()).collect();
    expected_rhs.sort();
    // The report's atom lists are alias-collapsed; compare the raw sides.
    let (_, rhs) =
        afcalc_core::calculus::expand_sides(2, &f_atom(), &g_atom(), &RewriteConfig::default())
            .unwrap();
    assert_eq!(
        rhs.nf.atoms, expected_rhs,
        "right side matches the display list"
    );

    assert_eq!(pairing_group_sizes(&report.pairing), [3, 3, 1, 10, 14]);
    let pairing_fixture = include_str!("../fixtures/pairing_order2.txt");
    let mut expected_pairs = Vec::new();
    for line in pairing_fixture.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('|').map(str::trim);
        let lhs = cols.next().unwrap().to_string();
        let ty = cols.next().unwrap().to_string();
        let rhs: Vec<String> = cols
            .next()
            .unwrap()
            .split_whitespace()
            .map(str::to_string)
            .collect();
        expected_pairs.push((lhs, ty, rhs));
    }
    assert_eq!(report.pairing.len(), expected_pairs.len());
    for (entry, (lhs, ty, rhs)) in report.pairing.iter().zip(&expected_pairs) {
        assert_eq!(&entry.lhs, lhs);
        assert_eq!(format!("{:?}", entry.proof_type), *ty);
        let mut sorted = rhs.clone();
        sorted.sort();
        assert_eq!(entry.rhs, sorted, "partners of {lhs}");
    }
    finish(
        "2 (second-order chain rule)",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 3: the first-order chain rule verifies with eight atoms per
/// side, matching the hand expansion.
#[test]
fn criterion_3_first_order_chain_rule() {
    let started = Instant::now();
    let report = verify_chain_rule(1, &f_atom(), &g_atom(), &RewriteConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Equal);
    assert_eq!(report.lhs_atoms.len(), 8);
    assert_eq!(report.rhs_atoms.len(), 8);
    // Hand-expanded oracle (two summands from the derivative, six from the
    // basepoint split).
    let oracle = normalize(
        &parse_canonical(
            "D1[v] F(D1[v] G(v)) + D1[v] cr2 F(D1[v] G(v), G0) \
             + D1[v] F(D1[v] cr2 G(v, x)) + D1[v] cr2 F(D1[v] cr2 G(v, x), G0) \
             + D1[v] cr2 F(D1[v] G(v), cr1 G(x)) + D1[v] cr2 F(D1[v] cr2 G(v, x), cr1 G(x)) \
             + D1[v] cr3 F(D1[v] G(v), cr1 G(x), G0) \
             + D1[v] cr3 F(D1[v] cr2 G(v, x), cr1 G(x), G0)",
        )
        .unwrap(),
        &RewriteConfig::default(),
    )
    .unwrap()
    .nf
    .atoms;
    assert_eq!(report.lhs_atoms, oracle);
    finish(
        "3 (first-order chain rule)",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 4: disabling any one of R3, R5, R6, R7b, R8a, R8b makes the
/// second-order verification report a mismatch.
#[test]
fn criterion_4_mutation_sensitivity() {
    let started = Instant::now();
    for rule in [
        RuleId::R3,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7b,
        RuleId::R8a,
        RuleId::R8b,
    ] {
        let cfg = RewriteConfig::without(rule);
        let report = verify_chain_rule(2, &f_atom(), &g_atom(), &cfg).unwrap();
        assert_eq!(
            report.verdict,
            Verdict::Mismatch,
            "verification must fail without {rule:?}"
        );
        assert!(report.diff.is_some());
    }
    finish("4 (mutation sensitivity)", started, Duration::from_secs(30));
}

/// Criterion 5: one hundred randomized rule orders on a fifty-term corpus of
/// depth at most five all produce the staged strategy's canonical multiset.
#[test]
fn criterion_5_confluence_suite() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let corpus: Vec<Term> = (0..50).map(|_| random_term(&mut rng, 5)).collect();
    for (i, t) in corpus.iter().enumerate() {
        let reference = normalize(t, &RewriteConfig::default()).unwrap();
        for run in 0..100 {
            let cfg = RewriteConfig {
                random_order: Some((i as u64) << 32 | run),
                ..RewriteConfig::default()
            };
            let random = normalize(t, &cfg).unwrap();
            assert_eq!(
                random.nf.atoms, reference.nf.atoms,
                "term {i}, run {run} diverged"
            );
        }
    }
    finish("5 (confluence suite)", started, Duration::from_secs(120));
}

/// Criterion 6: exactness of the concrete backend on the combinator library
/// at dimensions up to three, in under thirty seconds.
#[test]
fn criterion_6_concrete_exactness() {
    let started = Instant::now();
    let library: Vec<(&str, ConcreteFunctor)> = vec![
        ("identity", ConcreteFunctor::Identity),
        ("constant2", ConcreteFunctor::Constant(2)),
        ("tensor2", ConcreteFunctor::TensorPower(2)),
        ("sym2", ConcreteFunctor::SymPower(2)),
        ("tensor3", ConcreteFunctor::TensorPower(3)),
        (
            "id+tensor2",
            ConcreteFunctor::sum(ConcreteFunctor::Identity, ConcreteFunctor::TensorPower(2)),
        ),
        (
            "tensor2.id",
            ConcreteFunctor::compose(ConcreteFunctor::TensorPower(2), ConcreteFunctor::Identity),
        ),
    ];
    for (name, f) in &library {
        let top = if *name == "tensor3" { 2 } else { 3 };
        // Idempotents are exactly idempotent; splittings are exact.
        let split = cross_effect_split(f, &[top.min(2), 1]);
        split.validate().unwrap();
        assert_eq!(&split.proj * &split.incl, Mat::identity(split.dim()));
        // Dimension recursion of the defining decompositions.
        for a in 0..=top {
            for b in 0..=top {
                assert_eq!(
                    f.dim(a + b),
                    f.dim(0)
                        + cross_effect_dim(f, &[a])
                        + cross_effect_dim(f, &[b])
                        + cross_effect_dim(f, &[a, b]),
                    "{name} at ({a}, {b})"
                );
            }
        }
        // Zero slots annihilate.
        assert_eq!(cross_effect_dim(f, &[0, top]), 0, "{name}");
        assert_eq!(cross_effect_dim(f, &[1, 0, 1]), 0, "{name}");
        // ∂ ∘ ∂ = 0 for every constructed complex (validated inside).
        linearization_complex(f, 2, 2).unwrap();
    }
    assert_eq!(cross_effect_dim(&ConcreteFunctor::Identity, &[3, 3]), 0);
    finish("6 (concrete exactness)", started, Duration::from_secs(30));
}

/// Criterion 7: the pinned homology values.
#[test]
fn criterion_7_concrete_homology() {
    let started = Instant::now();
    for d in 1..=3 {
        let c = linearization_complex(&ConcreteFunctor::Identity, d, 2).unwrap();
        assert_eq!(c.homology_dims()[0], d, "identity at dim {d}");
    }
    let c = linearization_complex(&ConcreteFunctor::TensorPower(2), 2, 2).unwrap();
    assert_eq!(c.homology_dims()[0], 0, "tensor square");

    // The contractibility instance at dims (1, 1).
    let asg = Assignment::default()
        .with_functor("F", ConcreteFunctor::TensorPower(2))
        .with_functor("G", ConcreteFunctor::TensorPower(2))
        .with_dim("x1", 1)
        .with_dim("x2", 1);
    let lhs = parse_canonical("D1[x2] cr2 F(cr1 G(x2), cr2 G(x1, x2))").unwrap();
    let report = check_rule_concrete(RuleId::R5, &lhs, &Term::Zero, &asg, 2).unwrap();
    assert!(report.supported);
    assert_eq!(report.degrees, vec![(0, 0, 0), (1, 0, 0)], "H0 = H1 = 0");

    // The unit cross-effect collapse in degrees 0 and 1.
    let asg8 = Assignment::default()
        .with_functor(
            "F",
            ConcreteFunctor::sum(ConcreteFunctor::TensorPower(2), ConcreteFunctor::Identity),
        )
        .with_dim("x", 2);
    let lhs = parse_canonical("D1[x] cr1 F(x)").unwrap();
    let rhs = parse_canonical("D1[x] F(x)").unwrap();
    let report = check_rule_concrete(RuleId::R8a, &lhs, &rhs, &asg8, 2).unwrap();
    assert!(report.supported && report.equal, "{report:?}");
    finish("7 (concrete homology)", started, Duration::from_secs(30));
}

/// Criterion 8: the headline equivalence rests on the symbolic multiset
/// match and on homology agreement for every representable rule instance.
#[test]
fn criterion_8_combined_evidence() {
    let started = Instant::now();
    // (a) symbolic: the second-order verification is an equality of
    // canonical multisets.
    let report = verify_chain_rule(2, &f_atom(), &g_atom(), &RewriteConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Equal);
    assert_eq!(report.lhs_atoms, report.rhs_atoms);
    // (b) concrete: every rule instance the backend can evaluate agrees in
    // homology below the truncation. Sampled across the rule catalog; the
    // instances mirror the per-rule examples.
    let asg = Assignment::default()
        .with_functor("F", ConcreteFunctor::TensorPower(2))
        .with_functor(
            "G",
            ConcreteFunctor::sum(ConcreteFunctor::Identity, ConcreteFunctor::TensorPower(2)),
        )
        .with_dim("x", 1)
        .with_dim("y", 2)
        .with_dim("z", 1)
        .with_dim("x1", 1)
        .with_dim("x2", 1);
    let instances: Vec<(RuleId, &str, &str)> = vec![
        (
            RuleId::R1,
            "cr2 F(x + y, z)",
            "cr2 F(x, z) + cr2 F(y, z) + cr3 F(x, y, z)",
        ),
        (RuleId::R2, "cr2 F(0, x)", "0"),
        (
            RuleId::R6,
            "cr2 F(y, G(x))",
            "cr2 F(y, G0) + cr2 F(y, cr1 G(x)) + cr3 F(y, G0, cr1 G(x))",
        ),
        (RuleId::R8a, "D1[y] cr1 F(y)", "D1[y] F(y)"),
    ];
    for (rule, lhs, rhs) in instances {
        let l = parse_canonical(lhs).unwrap();
        let r = parse_canonical(rhs).unwrap();
        let report = check_rule_concrete(rule, &l, &r, &asg, 2).unwrap();
        assert!(report.supported && report.equal, "{rule:?}: {report:?}");
    }
    // The composite cover expansion agrees with its normal form on honest
    // functors.
    let lhs = parse_canonical("cr2 (F o G)(x1, x2)").unwrap();
    let rhs = normalize(&lhs, &RewriteConfig::default())
        .unwrap()
        .nf
        .as_term();
    let report = check_rule_concrete(RuleId::R3, &lhs, &rhs, &asg, 2).unwrap();
    assert!(report.supported && report.equal, "{report:?}");
    finish("8 (combined evidence)", started, Duration::from_secs(60));
}
