//! Directional derivatives and the chain-rule verifier.
//!
//! `nabla` and `delta` build the two- and four-summand expansions of the
//! first and second directional derivatives. `expand_sides` normalizes the
//! two sides of the chain rule `Δ_n(F∘G) ≃ Δ_nF(Δ-tower of G; G(x))` and
//! `verify_chain_rule` compares the canonical multisets, classifying the
//! matched summands by proof type when the expansion is the standard
//! second-order one.

use crate::grammar::parse_canonical;
use crate::rewrite::{normalize, Normalization, RewriteConfig, RewriteError};
use crate::term::{
    alias_of, canonicalize, collapse_aliases, Func, ObjectExpr, Term, TermError, VarName,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

const LHS_FIXTURE: &str = include_str!("../fixtures/lhs_order2.txt");
const RHS_FIXTURE: &str = include_str!("../fixtures/rhs_order2.txt");

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// `∇F(v; x) ≃ D₁F(v) ⊕ D₁¹cr₂F(v, x)`; the equivalent two-summand form is
/// taken as the definition.
pub fn nabla(
    func: &Func,
    direction: &ObjectExpr,
    basepoint: &ObjectExpr,
) -> Result<Term, TermError> {
    delta(1, func, std::slice::from_ref(direction), basepoint)
}

/// The order-0/1/2 directional derivative as an expanded term. Directions
/// must be plain variables (or zero); the duplicated second-order direction
/// is aliased.
pub fn delta(
    order: u8,
    func: &Func,
    directions: &[ObjectExpr],
    basepoint: &ObjectExpr,
) -> Result<Term, TermError> {
    if directions.len() != order as usize {
        return Err(TermError::DirectionCount {
            order,
            got: directions.len(),
        });
    }
    for d in directions {
        if matches!(d.canonicalize(), ObjectExpr::Sum(..)) {
            return Err(TermError::DirectionNotVariable(order));
        }
    }
    crate::rewrite::expand_delta_term(order, func, directions, basepoint)
        .ok_or(TermError::DirectionNotVariable(order))
        .map(|t| canonicalize(&t))
}

/// Outcome of a multiset comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Equal,
    Mismatch,
}

/// Which argument in the matching proof justifies a pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofType {
    Type1,
    Type2,
    Type3,
    Type4,
    Type5,
}

impl ProofType {
    pub fn description(&self) -> &'static str {
        match self {
            ProofType::Type1 => "one slot composition through a reduced inner cross effect",
            ProofType::Type2 => "slot composition followed by the unit cross-effect collapse",
            ProofType::Type3 => "composition rule with correction summand",
            ProofType::Type4 => "two slot compositions and the marker collapse",
            ProofType::Type5 => "two slot compositions and both idempotent collapses",
        }
    }
}

fn proof_type_table() -> BTreeMap<&'static str, ProofType> {
    let mut m = BTreeMap::new();
    for a in ["A3", "A5", "A7"] {
        m.insert(a, ProofType::Type1);
    }
    for a in ["A2", "A4", "A6"] {
        m.insert(a, ProofType::Type2);
    }
    m.insert("A1", ProofType::Type3);
    for a in [
        "A9", "A13", "A14", "A15", "A18", "A19", "A20", "A23", "A27", "A31",
    ] {
        m.insert(a, ProofType::Type4);
    }
    for a in [
        "A8", "A10", "A11", "A12", "A16", "A17", "A21", "A22", "A24", "A25", "A26", "A28", "A29",
        "A30",
    ] {
        m.insert(a, ProofType::Type5);
    }
    m
}

/// One matched left-hand summand: its label, the right-hand atoms it reduces
/// to, and the proof type that justifies the match.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingEntry {
    pub lhs: String,
    pub rhs: Vec<String>,
    pub proof_type: ProofType,
}

/// Result of verifying a chain rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub order: u8,
    pub verdict: Verdict,
    /// Canonical atoms of both sides, after alias collapse.
    pub lhs_atoms: Vec<Term>,
    pub rhs_atoms: Vec<Term>,
    /// The left-hand summands before the composition rules fire.
    pub lhs_pre_split: Vec<Term>,
    /// Per-summand classification; filled for the standard order-2 case.
    pub pairing: Vec<PairingEntry>,
    /// Multiset difference (lhs-only, rhs-only) on mismatch.
    pub diff: Option<(Vec<Term>, Vec<Term>)>,
    pub lhs_trace_len: usize,
    pub rhs_trace_len: usize,
}

/// Expands and normalizes both sides of the order-1 or order-2 chain rule
/// for the composite of two unary functors, over variables `w`, `v`, `x`.
pub fn expand_sides(
    order: u8,
    outer: &Func,
    inner: &Func,
    cfg: &RewriteConfig,
) -> Result<(Normalization, Normalization), CalculusError> {
    expand_sides_with_vars(order, outer, inner, "w", "v", "x", cfg)
}

pub fn expand_sides_with_vars(
    order: u8,
    outer: &Func,
    inner: &Func,
    w: &str,
    v: &str,
    x: &str,
    cfg: &RewriteConfig,
) -> Result<(Normalization, Normalization), CalculusError> {
    assert!(order == 1 || order == 2, "orders 1 and 2 are supported");
    let base = ObjectExpr::var(x);
    let dirs: Vec<ObjectExpr> = if order == 2 {
        vec![ObjectExpr::var(w), ObjectExpr::var(v)]
    } else {
        vec![ObjectExpr::var(v)]
    };
    let lhs_term = Term::Delta {
        order,
        func: Func::compose(outer.clone(), inner.clone()),
        directions: dirs.clone(),
        basepoint: base.clone(),
    };
    let lhs = normalize(&lhs_term, cfg)?;

    // The right-hand side substitutes the Δ-tower of the inner functor into
    // the expanded derivative of the outer one, distributing the linear
    // markers over the direction sums during construction.
    let g_at_x = Term::Apply {
        func: inner.clone(),
        args: vec![Term::Obj(base.clone())],
    };
    let first_dirs = delta(1, inner, &[ObjectExpr::var(v)], &base)?.summands();
    let vbar = alias_of(v);
    let mut rename = BTreeMap::new();
    rename.insert(v.to_string(), vbar.clone());
    let first_dirs_aliased: Vec<Term> = first_dirs
        .iter()
        .map(|t| canonicalize(&t.rename_vars(&rename)))
        .collect();

    let mut rhs_summands: Vec<Term> = Vec::new();
    if order == 1 {
        for b in &first_dirs {
            rhs_summands.push(lin_headed(
                b,
                Term::Apply {
                    func: outer.clone(),
                    args: vec![b.clone()],
                },
            ));
            rhs_summands.push(lin_headed(
                b,
                Term::Cross {
                    n: 2,
                    func: outer.clone(),
                    args: vec![b.clone(), g_at_x.clone()],
                },
            ));
        }
    } else {
        let second_dirs = delta(2, inner, &dirs, &base)?.summands();
        for a in &second_dirs {
            rhs_summands.push(lin_headed(
                a,
                Term::Apply {
                    func: outer.clone(),
                    args: vec![a.clone()],
                },
            ));
        }
        for b in &first_dirs {
            for bb in &first_dirs_aliased {
                let stack = [head_var(b), head_var(bb)];
                rhs_summands.push(Term::under_lin(
                    &stack,
                    Term::Cross {
                        n: 2,
                        func: outer.clone(),
                        args: vec![b.clone(), bb.clone()],
                    },
                ));
                rhs_summands.push(Term::under_lin(
                    &stack,
                    Term::Cross {
                        n: 3,
                        func: outer.clone(),
                        args: vec![b.clone(), bb.clone(), g_at_x.clone()],
                    },
                ));
            }
        }
        for a in &second_dirs {
            rhs_summands.push(lin_headed(
                a,
                Term::Cross {
                    n: 2,
                    func: outer.clone(),
                    args: vec![a.clone(), g_at_x.clone()],
                },
            ));
        }
    }
    let rhs = normalize(&Term::Sum(rhs_summands), cfg)?;
    Ok((lhs, rhs))
}

/// Leading marker variable of a linearized atom.
fn head_var(t: &Term) -> VarName {
    let (stack, base) = t.strip_lin();
    match stack.first() {
        Some(v) => v.clone(),
        None => base
            .free_vars()
            .into_iter()
            .next()
            .unwrap_or_else(|| "v".to_string()),
    }
}

fn lin_headed(direction_atom: &Term, body: Term) -> Term {
    Term::lin(&head_var(direction_atom), body)
}

/// Collapses the duplicated-direction alias and canonicalizes a multiset.
fn collapse_atoms(atoms: &[Term], v: &str) -> Vec<Term> {
    let mut aliases = BTreeMap::new();
    aliases.insert(alias_of(v), v.to_string());
    let mut out: Vec<Term> = atoms
        .iter()
        .map(|t| collapse_aliases(t, &aliases).expect("acyclic alias map"))
        .collect();
    out.sort();
    out
}

fn multiset_diff(a: &[Term], b: &[Term]) -> (Vec<Term>, Vec<Term>) {
    let mut only_a = Vec::new();
    let mut b_remaining: Vec<&Term> = b.iter().collect();
    for t in a {
        if let Some(pos) = b_remaining.iter().position(|u| *u == t) {
            b_remaining.swap_remove(pos);
        } else {
            only_a.push(t.clone());
        }
    }
    (only_a, b_remaining.into_iter().cloned().collect())
}

fn parse_fixture(text: &str) -> Vec<(String, Term)> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            let (label, term) = l.split_once('|').expect("fixture line has `label | term`");
            (
                label.trim().to_string(),
                parse_canonical(term.trim()).expect("fixture term parses"),
            )
        })
        .collect()
}

/// Verifies the chain rule at the given order for `outer ∘ inner` and
/// reports the matching. A mismatch is a report, not an error.
pub fn verify_chain_rule(
    order: u8,
    outer: &Func,
    inner: &Func,
    cfg: &RewriteConfig,
) -> Result<VerificationReport, CalculusError> {
    verify_chain_rule_with_vars(order, outer, inner, "w", "v", "x", cfg)
}

pub fn verify_chain_rule_with_vars(
    order: u8,
    outer: &Func,
    inner: &Func,
    w: &str,
    v: &str,
    x: &str,
    cfg: &RewriteConfig,
) -> Result<VerificationReport, CalculusError> {
    let (lhs, rhs) = expand_sides_with_vars(order, outer, inner, w, v, x, cfg)?;
    let lhs_atoms = collapse_atoms(&lhs.nf.atoms, v);
    let rhs_atoms = collapse_atoms(&rhs.nf.atoms, v);
    let verdict = if lhs_atoms == rhs_atoms {
        Verdict::Equal
    } else {
        Verdict::Mismatch
    };
    let diff = match verdict {
        Verdict::Equal => None,
        Verdict::Mismatch => Some(multiset_diff(&lhs_atoms, &rhs_atoms)),
    };
    let lhs_pre_split = lhs.pre_composition.clone().unwrap_or_default();
    let pairing = if order == 2 && verdict == Verdict::Equal {
        compute_pairing(&lhs_pre_split, &rhs.nf.atoms, cfg)
    } else {
        Vec::new()
    };
    Ok(VerificationReport {
        order,
        verdict,
        lhs_atoms,
        rhs_atoms,
        lhs_pre_split,
        pairing,
        diff,
        lhs_trace_len: lhs.nf.trace.len(),
        rhs_trace_len: rhs.nf.trace.len(),
    })
}

/// Classifies the pre-split left-hand summands against the labeled displays.
/// Empty when the expansion is not the standard abstract one (for example
/// with an identity inner functor, where most summands annihilate).
fn compute_pairing(
    lhs_pre_split: &[Term],
    rhs_atoms: &[Term],
    cfg: &RewriteConfig,
) -> Vec<PairingEntry> {
    let lhs_fixture = parse_fixture(LHS_FIXTURE);
    let rhs_fixture = parse_fixture(RHS_FIXTURE);
    let mut lhs_sorted: Vec<Term> = lhs_fixture.iter().map(|(_, t)| t.clone()).collect();
    lhs_sorted.sort();
    let mut pre_sorted = lhs_pre_split.to_vec();
    pre_sorted.sort();
    if lhs_sorted != pre_sorted {
        return Vec::new();
    }
    let rhs_label: BTreeMap<Term, String> = rhs_fixture
        .iter()
        .map(|(l, t)| (t.clone(), l.clone()))
        .collect();
    {
        let mut rhs_sorted: Vec<Term> = rhs_fixture.iter().map(|(_, t)| t.clone()).collect();
        rhs_sorted.sort();
        let mut atoms_sorted = rhs_atoms.to_vec();
        atoms_sorted.sort();
        if rhs_sorted != atoms_sorted {
            return Vec::new();
        }
    }
    let types = proof_type_table();
    let mut pairing = Vec::new();
    for (label, term) in &lhs_fixture {
        let strict = RewriteConfig {
            disabled: Default::default(),
            ..cfg.clone()
        };
        let atoms = match normalize(term, &strict) {
            Ok(n) => n.nf.atoms,
            Err(_) => return Vec::new(),
        };
        let mut rhs_labels: Vec<String> = atoms
            .iter()
            .filter_map(|a| rhs_label.get(a).cloned())
            .collect();
        if rhs_labels.len() != atoms.len() {
            return Vec::new();
        }
        rhs_labels.sort();
        let proof_type = match types.get(label.as_str()) {
            Some(t) => *t,
            None => return Vec::new(),
        };
        pairing.push(PairingEntry {
            lhs: label.clone(),
            rhs: rhs_labels,
            proof_type,
        });
    }
    pairing
}

/// Sizes of the proof-type groups in a pairing, in Type1..Type5 order.
pub fn pairing_group_sizes(pairing: &[PairingEntry]) -> [usize; 5] {
    let mut sizes = [0usize; 5];
    for entry in pairing {
        let idx = match entry.proof_type {
            ProofType::Type1 => 0,
            ProofType::Type2 => 1,
            ProofType::Type3 => 2,
            ProofType::Type4 => 3,
            ProofType::Type5 => 4,
        };
        sizes[idx] += 1;
    }
    sizes
}
