//! The rewrite system: rules extracted from the cross-effect calculus, a
//! normalization strategy, and citation-carrying traces.
//!
//! Normalization runs in two stages. Stage one expands derivative nodes,
//! rewrites composite cross effects through the cover formula, splits sums
//! and unreduced applications, distributes linearizations over sums, and
//! contracts diagonal linearizations. The multiset of summands at the end of
//! stage one is the "pre-composition" snapshot (for the second-order
//! left-hand side these are the 31 classical summands). Stage two pushes
//! linearizations through compositions and collapses the linearization
//! idempotents, producing atomic summands.

mod measure;
mod rules;

use crate::term::{canonicalize, Term};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub use measure::measure;
pub use rules::{
    exceeds_split_budget, expand_delta as expand_delta_term, reduce_zeros, structurally_reduced,
    SPLIT_BUDGET,
};

/// Identifiers for the rewrite rules; every trace step carries one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    /// Cross-effect slots distribute over direct sums.
    R1,
    /// Zero annihilation and the identity-functor laws.
    R2,
    /// Cross effects of a composite expand over covers; composite
    /// applications unfold.
    R3,
    /// Linearization distributes over direct sums; linearization of a
    /// constant vanishes.
    R4,
    /// Linearization of a diagonal of a multireduced functor contracts.
    R5,
    /// Unreduced applications in cross-effect slots split off their constant
    /// part.
    R6,
    /// Linearization pushes through a composition with reduced inner part.
    R7a,
    /// Linearization of a composition with unreduced inner part splits off a
    /// correction summand.
    R7b,
    /// The linearization of a first cross effect is the linearization of the
    /// functor.
    R8a,
    /// Stacked linearizations of the same slot collapse to one.
    R8b,
    /// Directional-derivative nodes expand to linearizations of cross
    /// effects.
    R9,
}

impl RuleId {
    pub const ALL: [RuleId; 11] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7a,
        RuleId::R7b,
        RuleId::R8a,
        RuleId::R8b,
        RuleId::R9,
    ];

    /// A self-contained statement of the fact the rule implements.
    pub fn citation(&self) -> &'static str {
        match self {
            RuleId::R1 => {
                "cr_n F(..., x ⊕ y, ...) ≅ cr_n F(..., x, ...) ⊕ cr_n F(..., y, ...) \
                 ⊕ cr_{n+1} F(..., x, y, ...); cross effects are multi-additive up to \
                 the next cross effect"
            }
            RuleId::R2 => {
                "cr_n F(x_1, ..., x_n) ≅ 0 when some x_i = 0; cross effects are \
                 multi-reduced. Identity laws: Id(t) = t, cr_1 of a reduced functor \
                 is the functor, cr_n Id ≅ 0 for n ≥ 2, R(0) ≅ 0 for reduced R"
            }
            RuleId::R3 => {
                "cr_p(F ∘ G)(x_1, ..., x_p) ≅ ⊕ cr_k F(cr_{U_1} G, ..., cr_{U_k} G) \
                 over covers {U_1, ..., U_k} of {1..p} by distinct subsets, with \
                 cr_∅ G = G(0); (F ∘ G)(x) = F(G(x))"
            }
            RuleId::R4 => {
                "D_1 is linear: D_1 F(x ⊕ y) ≃ D_1 F(x) ⊕ D_1 F(y), \
                 D_1(F ⊕ G) ≅ D_1 F ⊕ D_1 G, and D_1 of a constant functor vanishes"
            }
            RuleId::R5 => {
                "if F factors as a strictly multi-reduced functor precomposed with \
                 the diagonal, then D_1 F is contractible"
            }
            RuleId::R6 => {
                "F(x) ≅ F(0) ⊕ cr_1 F(x), so cr_k F(x_1, ..., G(x)) splits into the \
                 three summands with G(0) and cr_1 G(x) in the last slot"
            }
            RuleId::R7a => {
                "for reduced H, D_1(F ∘ H)(x) ≃ D_1 F ∘ D_1 H(x); applied slot-wise \
                 when the linearized variable sits in a single reduced slot"
            }
            RuleId::R7b => {
                "D_1(F ∘ G)(x) ≃ D_1 F ∘ D_1 G(x) ⊕ D_1^x cr_2 F(cr_1 G(x), G(0)) \
                 for arbitrary composable F, G"
            }
            RuleId::R8a => "D_1 cr_1 F(x) ≃ D_1 F(x)",
            RuleId::R8b => {
                "D_1 D_1 F(x) ≃ D_1 F(x): a linear functor is its own linearization; \
                 a degree-0 complex in an argument slot is its degree-0 value"
            }
            RuleId::R9 => {
                "Δ_0 F(x) = F(x); Δ_1 F(v; x) ≃ D_1 F(v) ⊕ D_1¹ cr_2 F(v, x); \
                 Δ_2 F(w, v; x) ≃ D_1 F(w) ⊕ D_1¹ cr_2 F(w, x) ⊕ D_1¹ D_1² cr_2 F(v, v̄) \
                 ⊕ D_1¹ D_1² cr_3 F(v, v̄, x) with v̄ := v"
            }
        }
    }

    /// Short description of the redex shape, for the exported catalog.
    pub fn pattern(&self) -> &'static str {
        match self {
            RuleId::R1 => "cross effect with a direct sum in a slot",
            RuleId::R2 => "zero or identity-functor material in applied position",
            RuleId::R3 => "cross effect or application of a formal composite",
            RuleId::R4 => "linearization marker over a direct sum or a constant",
            RuleId::R5 => "marker variable in two or more reduced slots of one cross effect",
            RuleId::R6 => "unreduced application in a cross-effect slot",
            RuleId::R7a => "marker variable inside a single reduced unsealed slot",
            RuleId::R7b => "linearization of an application of a composite",
            RuleId::R8a => "linearization marker over a first cross effect with sealed slot",
            RuleId::R8b => "redundant linearization markers over one application",
            RuleId::R9 => "nabla or delta node",
        }
    }
}

/// One entry of the exported rule catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleInfo {
    pub id: RuleId,
    pub citation: String,
    pub pattern: String,
}

/// The rule catalog as data, for documentation generation.
pub fn rule_catalog() -> Vec<RuleInfo> {
    RuleId::ALL
        .iter()
        .map(|id| RuleInfo {
            id: *id,
            citation: id.citation().to_string(),
            pattern: id.pattern().to_string(),
        })
        .collect()
}

/// A cover of `{1..p}`: pairwise distinct subsets (the empty set allowed)
/// whose union is all of `{1..p}`. Members and the member list are kept in
/// canonical order: subsets sorted by size then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cover {
    pub members: Vec<Vec<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("covers are defined for p ≥ 1")]
    ZeroP,
    #[error("cover enumeration for p = {0} exceeds the configured bound of 4")]
    TooLarge(usize),
}

/// Subsets of `{1..p}` in canonical order: by size, then lexicographically.
fn ordered_subsets(p: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << p))
        .map(|mask| {
            (1..=p)
                .filter(|i| mask & (1 << (i - 1)) != 0)
                .collect::<Vec<_>>()
        })
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Enumerates every cover of `{1..p}` in deterministic order: by number of
/// members, then lexicographically on the member lists.
pub fn enumerate_covers(p: usize) -> Result<Vec<Cover>, CoverError> {
    if p == 0 {
        return Err(CoverError::ZeroP);
    }
    if p > 4 {
        return Err(CoverError::TooLarge(p));
    }
    let subsets = ordered_subsets(p);
    let full: u32 = (1 << p) - 1;
    let masks: Vec<u32> = subsets
        .iter()
        .map(|s| s.iter().fold(0u32, |m, i| m | (1 << (i - 1))))
        .collect();
    let mut covers = Vec::new();
    // Choose strictly increasing index sequences; sizes grow outermost so the
    // output is ordered by member count first.
    for size in 1..=subsets.len() {
        let mut choice: Vec<usize> = Vec::with_capacity(size);
        backtrack(&subsets, &masks, full, size, 0, &mut choice, &mut covers);
    }
    Ok(covers)
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    subsets: &[Vec<usize>],
    masks: &[u32],
    full: u32,
    size: usize,
    start: usize,
    choice: &mut Vec<usize>,
    out: &mut Vec<Cover>,
) {
    if choice.len() == size {
        let union = choice.iter().fold(0u32, |m, &i| m | masks[i]);
        if union == full {
            out.push(Cover {
                members: choice.iter().map(|&i| subsets[i].clone()).collect(),
            });
        }
        return;
    }
    let remaining = size - choice.len();
    for i in start..subsets.len() {
        if subsets.len() - i < remaining {
            break;
        }
        choice.push(i);
        backtrack(subsets, masks, full, size, i + 1, choice, out);
        choice.pop();
    }
}

/// One rewrite step: `before` is the summand that was rewritten, `after` its
/// replacement (often a direct sum). Replaying the trace from the input
/// reproduces the normal form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: RuleId,
    pub before: Term,
    pub after: Term,
    pub citation: String,
}

/// Canonical multiset of atomic summands plus the trace that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalForm {
    /// Sorted under the global term order; equal normal forms compare
    /// bit-identically.
    pub atoms: Vec<Term>,
    pub trace: Vec<TraceStep>,
}

impl NormalForm {
    /// Reifies the multiset back into a single term.
    pub fn as_term(&self) -> Term {
        Term::sum(self.atoms.clone())
    }

    pub fn all_atomic(&self) -> bool {
        self.atoms.iter().all(|a| a.is_atomic_summand())
    }
}

/// Result of normalization: the normal form plus the stage-one snapshot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Normalization {
    pub nf: NormalForm,
    /// Multiset of summands after expansion and contraction but before the
    /// composition-pushing rules; `None` for randomized-order runs.
    pub pre_composition: Option<Vec<Term>>,
}

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("step bound of {fuel} exhausted; {pending} summands still reducible")]
    FuelExhausted {
        fuel: usize,
        pending: usize,
        partial: Box<NormalForm>,
    },
    #[error("termination measure did not decrease under {rule:?}")]
    MeasureViolation {
        rule: RuleId,
        before: Box<Term>,
        after: Box<Term>,
    },
}

/// Knobs for `normalize`; `Default` gives the standard strategy.
#[derive(Debug, Clone)]
pub struct RewriteConfig {
    pub fuel: usize,
    pub disabled: BTreeSet<RuleId>,
    /// `Some(seed)` randomizes the rule-application order (used by the
    /// confluence suite); the staged strategy is used when `None`.
    pub random_order: Option<u64>,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        RewriteConfig {
            fuel: 100_000,
            disabled: BTreeSet::new(),
            random_order: None,
        }
    }
}

impl RewriteConfig {
    pub fn without(rule: RuleId) -> Self {
        let mut cfg = RewriteConfig::default();
        cfg.disabled.insert(rule);
        cfg
    }
}

/// Stage-one rules, in the priority order the strategy applies them.
const STAGE1: [RuleId; 7] = [
    RuleId::R9,
    RuleId::R2,
    RuleId::R6,
    RuleId::R3,
    RuleId::R4,
    RuleId::R1,
    RuleId::R5,
];

/// Additional stage-two rules.
const STAGE2: [RuleId; 4] = [RuleId::R7b, RuleId::R7a, RuleId::R8b, RuleId::R8a];

struct Driver<'a> {
    cfg: &'a RewriteConfig,
    trace: Vec<TraceStep>,
    fuel_left: usize,
}

impl<'a> Driver<'a> {
    /// Runs the worklist to a fixpoint under `rules`; returns the sorted
    /// summand multiset.
    fn run(&mut self, start: Vec<Term>, rules: &[RuleId]) -> Result<Vec<Term>, RewriteError> {
        let mut pending: Vec<Term> = start;
        let mut normal: Vec<Term> = Vec::new();
        while let Some(t) = pending.pop() {
            let t = canonicalize(&t);
            // Zeros drop, sums split, and markers distribute over top-level
            // sums as worklist bookkeeping.
            let parts = distributed_summands(&t);
            if parts.len() != 1 || parts[0] != t {
                pending.extend(parts);
                continue;
            }
            let mut fired = None;
            for rule in rules {
                if self.cfg.disabled.contains(rule) {
                    continue;
                }
                if let Some(result) = rules::try_rule(*rule, &t) {
                    fired = Some((*rule, result));
                    break;
                }
            }
            match fired {
                Some((rule, result)) => {
                    self.step(rule, t, result, &mut pending, &mut normal)?;
                }
                None => normal.push(t),
            }
        }
        normal.sort();
        Ok(normal)
    }

    fn step(
        &mut self,
        rule: RuleId,
        before: Term,
        result: Term,
        pending: &mut Vec<Term>,
        normal: &mut [Term],
    ) -> Result<(), RewriteError> {
        if self.fuel_left == 0 {
            let mut atoms: Vec<Term> = normal.to_vec();
            atoms.extend(pending.iter().cloned());
            atoms.push(before);
            atoms.sort();
            return Err(RewriteError::FuelExhausted {
                fuel: self.cfg.fuel,
                pending: pending.len() + 1,
                partial: Box::new(NormalForm {
                    atoms,
                    trace: std::mem::take(&mut self.trace),
                }),
            });
        }
        self.fuel_left -= 1;
        let after = canonicalize(&result);
        // Termination: the multiset of per-summand measures strictly
        // decreases, where markers distribute over top-level sums (that is
        // where the worklist takes them next).
        let before_measures: Vec<_> = distributed_summands(&before).iter().map(measure).collect();
        let after_measures: Vec<_> = distributed_summands(&after).iter().map(measure).collect();
        if !multiset_decreases(&after_measures, &before_measures) {
            return Err(RewriteError::MeasureViolation {
                rule,
                before: Box::new(before),
                after: Box::new(after),
            });
        }
        self.trace.push(TraceStep {
            rule,
            before,
            after: after.clone(),
            citation: rule.citation().to_string(),
        });
        pending.extend(after.summands());
        Ok(())
    }

    /// Fully randomized rule order, for the confluence suite.
    fn run_random(&mut self, start: Vec<Term>, seed: u64) -> Result<Vec<Term>, RewriteError> {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut all: Vec<RuleId> = STAGE1.iter().chain(STAGE2.iter()).copied().collect();
        let mut pending = start;
        let mut normal: Vec<Term> = Vec::new();
        // Summands that are normal w.r.t. every rule move to `normal`; a
        // random pending summand and a random rule order are tried each step.
        while !pending.is_empty() {
            let idx = rng.gen_range(0..pending.len());
            let t = canonicalize(&pending.swap_remove(idx));
            let parts = distributed_summands(&t);
            if parts.len() != 1 || parts[0] != t {
                pending.extend(parts);
                continue;
            }
            all.shuffle(&mut rng);
            let mut fired = None;
            for rule in all.iter() {
                if self.cfg.disabled.contains(rule) {
                    continue;
                }
                if let Some(result) = rules::try_rule(*rule, &t) {
                    fired = Some((*rule, result));
                    break;
                }
            }
            match fired {
                Some((rule, result)) => {
                    self.step(rule, t, result, &mut pending, &mut normal)?;
                }
                None => normal.push(t),
            }
        }
        normal.sort();
        Ok(normal)
    }
}

/// Normalizes a term: expands derivative nodes, applies the rewrite rules to
/// a fixpoint under the staged strategy, and returns the sorted multiset of
/// atomic summands together with the trace.
pub fn normalize(t: &Term, cfg: &RewriteConfig) -> Result<Normalization, RewriteError> {
    let mut driver = Driver {
        cfg,
        trace: Vec::new(),
        fuel_left: cfg.fuel,
    };
    let start = canonicalize(t).summands();
    if let Some(seed) = cfg.random_order {
        let atoms = driver.run_random(start, seed)?;
        return Ok(Normalization {
            nf: NormalForm {
                atoms,
                trace: driver.trace,
            },
            pre_composition: None,
        });
    }
    let stage1 = driver.run(start, &STAGE1)?;
    let all: Vec<RuleId> = STAGE1.iter().chain(STAGE2.iter()).copied().collect();
    let atoms = driver.run(stage1.clone(), &all)?;
    Ok(Normalization {
        nf: NormalForm {
            atoms,
            trace: driver.trace,
        },
        pre_composition: Some(stage1),
    })
}

/// Applies one named rule at its deepest redex, if any. The per-rule entry
/// points below expose the catalog as operations; `None` means the rule does
/// not apply (skipped, not an error).
pub fn apply_rule(rule: RuleId, t: &Term) -> Option<Term> {
    rules::try_rule(rule, t).map(|r| canonicalize(&r))
}

/// Cover expansion of a composite cross effect (rule R3).
pub fn expand_composite_cross_effect(t: &Term) -> Option<Term> {
    apply_rule(RuleId::R3, t)
}

/// Slot sums, zero slots, and unreduced applications in slots (R1, R2, R6),
/// applied to a fixpoint.
pub fn split_sums_and_zeros(t: &Term) -> Term {
    let mut cur = canonicalize(t);
    loop {
        let step = apply_rule(RuleId::R2, &cur)
            .or_else(|| apply_rule(RuleId::R6, &cur))
            .or_else(|| apply_rule(RuleId::R1, &cur));
        match step {
            Some(next) => cur = next,
            None => return cur,
        }
    }
}

/// Linearization markers distribute over direct sums; markers over constants
/// vanish (rule R4).
pub fn distribute_linearization(t: &Term) -> Term {
    let mut cur = canonicalize(t);
    // Top-level distribution is pure bookkeeping in the worklist; as an
    // operation it materializes here.
    loop {
        let parts = distributed_summands(&cur);
        let flattened = canonicalize(&Term::Sum(parts));
        let next = match apply_rule(RuleId::R4, &flattened) {
            Some(n) => n,
            None => return flattened,
        };
        cur = next;
    }
}

/// Contracts linearizations of diagonals of multireduced functors (rule R5).
pub fn contract_diagonal(t: &Term) -> Term {
    let mut cur = canonicalize(t);
    while let Some(next) = apply_rule(RuleId::R5, &cur) {
        cur = next;
    }
    cur
}

/// Pushes markers through compositions, with the correction summand for
/// unreduced inner functors (rules R7a and R7b).
pub fn push_linearization_through_composite(t: &Term) -> Term {
    let mut cur = canonicalize(t);
    loop {
        let step = apply_rule(RuleId::R7b, &cur).or_else(|| apply_rule(RuleId::R7a, &cur));
        match step {
            Some(next) => cur = next,
            None => return cur,
        }
    }
}

/// Collapses the linearization idempotents (rules R8a and R8b).
pub fn collapse_linearization_idempotents(t: &Term) -> Term {
    let mut cur = canonicalize(t);
    loop {
        let step = apply_rule(RuleId::R8b, &cur).or_else(|| apply_rule(RuleId::R8a, &cur));
        match step {
            Some(next) => cur = next,
            None => return cur,
        }
    }
}

/// Summands of a term with linearization markers distributed over top-level
/// sums.
fn distributed_summands(t: &Term) -> Vec<Term> {
    match t {
        Term::Zero => Vec::new(),
        Term::Sum(ts) => ts.iter().flat_map(distributed_summands).collect(),
        Term::Lin { var, body } => distributed_summands(body)
            .into_iter()
            .map(|s| Term::Lin {
                var: var.clone(),
                body: Box::new(s),
            })
            .collect(),
        other => vec![other.clone()],
    }
}

/// Dershowitz–Manna multiset extension: `after` is obtained from `before`
/// by replacing at least one element with finitely many strictly smaller
/// ones.
fn multiset_decreases(after: &[measure::Measure], before: &[measure::Measure]) -> bool {
    let mut remaining: Vec<&measure::Measure> = before.iter().collect();
    let mut extra: Vec<&measure::Measure> = Vec::new();
    for a in after {
        if let Some(i) = remaining.iter().position(|b| *b == a) {
            remaining.swap_remove(i);
        } else {
            extra.push(a);
        }
    }
    if remaining.is_empty() {
        return false;
    }
    extra.iter().all(|a| remaining.iter().any(|b| a < b))
}

/// Replays a trace from `input`, checking every step rewrites a present
/// summand; returns the final multiset if the trace is coherent.
pub fn replay_trace(input: &Term, trace: &[TraceStep]) -> Option<Vec<Term>> {
    let mut multiset: Vec<Term> = distributed_summands(&canonicalize(input));
    for step in trace {
        let before = canonicalize(&step.before);
        let pos = multiset.iter().position(|t| *t == before)?;
        multiset.swap_remove(pos);
        multiset.extend(distributed_summands(&canonicalize(&step.after)));
    }
    multiset.sort();
    Some(multiset)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: filter every family of subsets of the power set.
    fn brute_force_covers(p: usize) -> Vec<Cover> {
        let subsets = ordered_subsets(p);
        let full: u32 = (1 << p) - 1;
        let masks: Vec<u32> = subsets
            .iter()
            .map(|s| s.iter().fold(0u32, |m, i| m | (1 << (i - 1))))
            .collect();
        let mut out = Vec::new();
        for family in 1u64..(1 << subsets.len()) {
            let mut union = 0u32;
            let mut members = Vec::new();
            for (i, s) in subsets.iter().enumerate() {
                if family & (1 << i) != 0 {
                    union |= masks[i];
                    members.push(s.clone());
                }
            }
            if union == full {
                out.push(Cover { members });
            }
        }
        out.sort_by(|a, b| {
            a.members
                .len()
                .cmp(&b.members.len())
                .then_with(|| a.members.cmp(&b.members))
        });
        out
    }

    #[test]
    fn cover_counts_match_brute_force() {
        for (p, expected) in [(1usize, 2usize), (2, 10), (3, 218)] {
            let fast = enumerate_covers(p).unwrap();
            let slow = brute_force_covers(p);
            assert_eq!(fast.len(), expected, "count for p = {p}");
            let mut sorted = fast.clone();
            sorted.sort();
            let mut slow_sorted = slow.clone();
            slow_sorted.sort();
            assert_eq!(sorted, slow_sorted, "cover sets for p = {p}");
        }
    }

    #[test]
    fn cover_order_is_by_size_then_lex() {
        let covers = enumerate_covers(2).unwrap();
        let expect: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![1, 2]],
            vec![vec![], vec![1, 2]],
            vec![vec![1], vec![2]],
            vec![vec![1], vec![1, 2]],
            vec![vec![2], vec![1, 2]],
            vec![vec![], vec![1], vec![2]],
            vec![vec![], vec![1], vec![1, 2]],
            vec![vec![], vec![2], vec![1, 2]],
            vec![vec![1], vec![2], vec![1, 2]],
            vec![vec![], vec![1], vec![2], vec![1, 2]],
        ];
        let got: Vec<Vec<Vec<usize>>> = covers.into_iter().map(|c| c.members).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn cover_domain_errors() {
        assert!(matches!(enumerate_covers(0), Err(CoverError::ZeroP)));
        assert!(matches!(enumerate_covers(5), Err(CoverError::TooLarge(5))));
        assert!(enumerate_covers(4).is_ok());
    }
}
