//! The individual rewrite rules.
//!
//! Every rule is a partial function on canonical summands. `try_rule` looks
//! for the deepest redex (children before parents) and returns the rewritten
//! summand, or `None` when the rule does not apply. Duplicating rules guard
//! against copying material that other rules still need to rewrite, so the
//! termination measure strictly decreases on every step.

use super::{enumerate_covers, RuleId};
use crate::term::{alias_of, canonicalize, Func, ObjectExpr, Role, Term, VarName};

pub fn try_rule(rule: RuleId, t: &Term) -> Option<Term> {
    let ctx = Ctx {
        in_arg: false,
        parent_lin: false,
    };
    match rule {
        RuleId::R1 => deepest(t, ctx, &r1_local),
        RuleId::R2 => deepest(t, ctx, &r2_local),
        RuleId::R3 => deepest(t, ctx, &r3_local),
        RuleId::R4 => deepest(t, ctx, &r4_local),
        RuleId::R5 => deepest(t, ctx, &r5_local),
        RuleId::R6 => deepest(t, ctx, &r6_local),
        RuleId::R7a => deepest(t, ctx, &r7a_local),
        RuleId::R7b => deepest(t, ctx, &r7b_local),
        RuleId::R8a => deepest(t, ctx, &r8a_local),
        RuleId::R8b => deepest(t, ctx, &r8b_local),
        RuleId::R9 => deepest(t, ctx, &r9_local),
    }
}

#[derive(Clone, Copy)]
struct Ctx {
    /// The position lies in an application argument subtree (through sums
    /// and applications, reset at linearization markers).
    in_arg: bool,
    /// The immediate parent is a linearization marker.
    parent_lin: bool,
}

/// Post-order search: rewrite the deepest redex first.
fn deepest(t: &Term, ctx: Ctx, local: &dyn Fn(&Term, Ctx) -> Option<Term>) -> Option<Term> {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) => {}
        Term::Apply { func, args } => {
            let child = Ctx {
                in_arg: true,
                parent_lin: false,
            };
            for (i, a) in args.iter().enumerate() {
                if let Some(new) = deepest(a, child, local) {
                    let mut args = args.clone();
                    args[i] = new;
                    return Some(Term::Apply {
                        func: func.clone(),
                        args,
                    });
                }
            }
        }
        Term::Cross { n, func, args } => {
            let child = Ctx {
                in_arg: true,
                parent_lin: false,
            };
            for (i, a) in args.iter().enumerate() {
                if let Some(new) = deepest(a, child, local) {
                    let mut args = args.clone();
                    args[i] = new;
                    return Some(Term::Cross {
                        n: *n,
                        func: func.clone(),
                        args,
                    });
                }
            }
        }
        Term::Lin { var, body } => {
            let child = Ctx {
                in_arg: false,
                parent_lin: true,
            };
            if let Some(new) = deepest(body, child, local) {
                return Some(Term::Lin {
                    var: var.clone(),
                    body: Box::new(new),
                });
            }
        }
        Term::Sum(ts) => {
            // Sums are transparent for the argument context.
            let child = Ctx {
                in_arg: ctx.in_arg,
                parent_lin: false,
            };
            for (i, a) in ts.iter().enumerate() {
                if let Some(new) = deepest(a, child, local) {
                    let mut ts = ts.clone();
                    ts[i] = new;
                    return Some(Term::Sum(ts));
                }
            }
        }
        Term::Nabla { .. } | Term::Delta { .. } => {}
    }
    local(t, ctx)
}

/// Material that duplicating rules may copy: nothing expandable, nothing
/// splittable in any surrounding context.
fn copy_safe(t: &Term) -> bool {
    super::measure::measure(t).0 == 0 && !t.occurs_sum() && !bare_unreduced_apply(t)
}

/// An application of an unreduced atom not shielded by a marker; such a node
/// is a splitting redex in argument position, so it must not be copied.
fn bare_unreduced_apply(t: &Term) -> bool {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) | Term::Lin { .. } => false,
        Term::Apply { func, args } => {
            (matches!(func, Func::Atom(_)) && !func.is_reduced())
                || args.iter().any(bare_unreduced_apply)
        }
        Term::Cross { args, .. } => args.iter().any(bare_unreduced_apply),
        Term::Sum(ts) => ts.iter().any(bare_unreduced_apply),
        Term::Nabla { .. } | Term::Delta { .. } => true,
    }
}

/// Free of composites and derivative nodes; duplicating such material keeps
/// the leading measure component flat.
fn expandable_free(t: &Term) -> bool {
    super::measure::measure(t).0 == 0
}

/// Reduces the purely zero-directed part of a term: zero slots annihilate
/// cross effects, reduced functors vanish at zero, dead markers vanish.
/// Used for the structural reducedness checks of R5 and R7.
pub fn reduce_zeros(t: &Term) -> Term {
    let t = canonicalize(t);
    match t {
        Term::Zero | Term::Obj(_) => t,
        Term::ConstZero(ref f) => {
            if f.is_reduced() {
                Term::Zero
            } else {
                t
            }
        }
        Term::Apply { func, args } => {
            let args: Vec<Term> = args.iter().map(reduce_zeros).collect();
            if matches!(func, Func::Atom(ref a) if a.role == Role::Identity) {
                return args.into_iter().next().unwrap_or(Term::Zero);
            }
            if func.is_reduced() && args.iter().all(|a| matches!(a, Term::Zero)) {
                return Term::Zero;
            }
            canonicalize(&Term::Apply { func, args })
        }
        Term::Cross { n, func, args } => {
            let args: Vec<Term> = args.iter().map(reduce_zeros).collect();
            if args.iter().any(|a| matches!(a, Term::Zero)) {
                return Term::Zero;
            }
            if matches!(func, Func::Atom(ref a) if a.role == Role::Identity) && n >= 2 {
                return Term::Zero;
            }
            canonicalize(&Term::Cross { n, func, args })
        }
        Term::Lin { ref var, ref body } => {
            let body = reduce_zeros(body);
            if matches!(body, Term::Zero) || !body.occurs(var) {
                return Term::Zero;
            }
            Term::Lin {
                var: var.clone(),
                body: Box::new(body),
            }
        }
        Term::Sum(ts) => Term::sum(ts.iter().map(reduce_zeros).collect()),
        Term::Nabla { .. } | Term::Delta { .. } => t,
    }
}

/// Does the term vanish (structurally) when `var` is replaced by zero?
pub fn structurally_reduced(t: &Term, var: &str) -> bool {
    matches!(
        reduce_zeros(&t.subst_obj(var, &ObjectExpr::Zero)),
        Term::Zero
    )
}

// --- R1: cross-effect slots distribute over direct sums ---------------------

fn r1_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    match t {
        Term::Cross { n, func, args } => {
            if !args.iter().any(|a| matches!(a, Term::Sum(_))) {
                return None;
            }
            // Composite cross effects expand over covers first; splitting
            // them here would duplicate the composite.
            if !matches!(func, Func::Atom(_)) || !split_budget_ok(args) {
                return None;
            }
            for a in args {
                match a {
                    Term::Sum(parts) => {
                        if !parts.iter().all(copy_safe) {
                            return None;
                        }
                    }
                    other => {
                        if !copy_safe(other) {
                            return None;
                        }
                    }
                }
            }
            Some(expand_cross_sums(*n, func, args))
        }
        Term::Apply { func, args } => {
            // A reduced unary functor is its own first cross effect, so a sum
            // in its argument splits the same way.
            if !func.is_reduced() || !matches!(func, Func::Atom(_)) || args.len() != 1 {
                return None;
            }
            let parts = match &args[0] {
                Term::Sum(parts) => parts.clone(),
                _ => return None,
            };
            if !parts.iter().all(copy_safe) || !split_budget_ok(args) {
                return None;
            }
            let mut out = Vec::new();
            for subset in nonempty_subsets(parts.len()) {
                let chosen: Vec<Term> = subset.iter().map(|&i| parts[i].clone()).collect();
                out.push(if chosen.len() == 1 {
                    Term::Apply {
                        func: func.clone(),
                        args: chosen,
                    }
                } else {
                    Term::Cross {
                        n: chosen.len(),
                        func: func.clone(),
                        args: chosen,
                    }
                });
            }
            Some(Term::Sum(out))
        }
        _ => None,
    }
}

/// Full multi-additive expansion of every sum-valued slot: each slot either
/// contributes one of its parts or a nonempty subset of parts as new slots of
/// a higher cross effect.
fn expand_cross_sums(n: usize, func: &Func, args: &[Term]) -> Term {
    let mut states: Vec<Vec<Term>> = vec![Vec::new()];
    for a in args {
        let choices: Vec<Vec<Term>> = match a {
            Term::Sum(parts) => nonempty_subsets(parts.len())
                .into_iter()
                .map(|s| s.into_iter().map(|i| parts[i].clone()).collect())
                .collect(),
            other => vec![vec![other.clone()]],
        };
        let mut next = Vec::new();
        for state in &states {
            for choice in &choices {
                let mut s = state.clone();
                s.extend(choice.clone());
                next.push(s);
            }
        }
        states = next;
    }
    let _ = n;
    Term::Sum(
        states
            .into_iter()
            .map(|slots| Term::Cross {
                n: slots.len(),
                func: func.clone(),
                args: slots,
            })
            .collect(),
    )
}

/// Expansion budget for multi-additive splitting; a slot sum with k parts
/// contributes 2^k - 1 subsets, so absurdly wide sums are left alone the way
/// oversized covers are.
pub const SPLIT_BUDGET: u128 = 8_192;

/// Does some application's full slot-sum expansion exceed [`SPLIT_BUDGET`]?
/// Such summands stay unexpanded and keep their sums.
pub fn exceeds_split_budget(t: &Term) -> bool {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) => false,
        Term::Apply { args, .. } | Term::Cross { args, .. } => {
            !split_budget_ok(args) || args.iter().any(exceeds_split_budget)
        }
        Term::Lin { body, .. } => exceeds_split_budget(body),
        Term::Sum(ts) => ts.iter().any(exceeds_split_budget),
        Term::Nabla { .. } | Term::Delta { .. } => false,
    }
}

fn split_budget_ok(args: &[Term]) -> bool {
    let mut total: u128 = 1;
    for a in args {
        if let Term::Sum(parts) = a {
            if parts.len() >= 32 {
                return false;
            }
            total = total.saturating_mul((1u128 << parts.len()) - 1);
            if total > SPLIT_BUDGET {
                return false;
            }
        }
    }
    true
}

fn nonempty_subsets(k: usize) -> Vec<Vec<usize>> {
    assert!(k < 32, "split budget keeps subset masks small");
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << k) {
        out.push((0..k).filter(|i| mask & (1 << i) != 0).collect());
    }
    out
}

// --- R2: zero annihilation and identity laws --------------------------------

fn r2_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    match t {
        Term::Cross { n, func, args } => {
            if args.iter().any(|a| matches!(a, Term::Zero)) {
                return Some(Term::Zero);
            }
            if let Func::Atom(a) = func {
                if a.role == Role::Identity {
                    return Some(if *n >= 2 { Term::Zero } else { args[0].clone() });
                }
            }
            // cr_1 of a reduced functor is the functor itself.
            if *n == 1 && func.is_reduced() && !args[0].occurs_sum() {
                return Some(Term::Apply {
                    func: func.clone(),
                    args: args.clone(),
                });
            }
            None
        }
        Term::Apply { func, args } => {
            if let Func::Atom(a) = func {
                if a.role == Role::Identity {
                    return Some(args[0].clone());
                }
            }
            None
        }
        Term::ConstZero(f) if f.is_reduced() => Some(Term::Zero),
        _ => None,
    }
}

// --- R3: composite cross effects expand over covers --------------------------

fn r3_local(t: &Term, ctx: Ctx) -> Option<Term> {
    match t {
        Term::Cross { n, func, args } => {
            let (outer, inner) = match func {
                Func::Compose(o, i) => (o.as_ref().clone(), i.as_ref().clone()),
                _ => return None,
            };
            if !args.iter().all(expandable_free) {
                return None;
            }
            let covers = enumerate_covers(*n).ok()?;
            let mut out = Vec::new();
            for cover in covers {
                let slots: Vec<Term> = cover
                    .members
                    .iter()
                    .map(|u| {
                        if u.is_empty() {
                            Term::ConstZero(inner.clone())
                        } else {
                            Term::Cross {
                                n: u.len(),
                                func: inner.clone(),
                                args: u.iter().map(|&s| args[s - 1].clone()).collect(),
                            }
                        }
                    })
                    .collect();
                out.push(Term::Cross {
                    n: slots.len(),
                    func: outer.clone(),
                    args: slots,
                });
            }
            Some(Term::Sum(out))
        }
        // (F ∘ G)(x) = F(G(x)). Under a marker the composite is kept for the
        // composition rules, which also produce the correction summand.
        Term::Apply { func, args } if !ctx.parent_lin => {
            if let Func::Compose(o, i) = func {
                Some(Term::Apply {
                    func: o.as_ref().clone(),
                    args: vec![Term::Apply {
                        func: i.as_ref().clone(),
                        args: args.clone(),
                    }],
                })
            } else {
                None
            }
        }
        _ => None,
    }
}

// --- R4: linearization distributes over sums ---------------------------------

fn r4_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    let (var, body) = match t {
        Term::Lin { var, body } => (var, body.as_ref()),
        _ => return None,
    };
    // Linearization of a constant functor vanishes.
    if !body.occurs(var) {
        return Some(Term::Zero);
    }
    if let Term::Sum(parts) = body {
        return Some(Term::Sum(
            parts
                .iter()
                .map(|p| Term::Lin {
                    var: var.clone(),
                    body: Box::new(p.clone()),
                })
                .collect(),
        ));
    }
    // Slot-wise linearity: a sum in the single marked slot distributes when
    // every part is reduced in the marker variable.
    let (stack, app) = body.strip_lin();
    let (n, func, args, is_cross) = match app {
        Term::Cross { n, func, args } => (*n, func, args, true),
        Term::Apply { func, args } => (args.len(), func, args, false),
        _ => return None,
    };
    let hits: Vec<usize> = (0..args.len()).filter(|&i| args[i].occurs(var)).collect();
    if hits.len() != 1 {
        return None;
    }
    let slot = hits[0];
    let parts = match &args[slot] {
        Term::Sum(parts) => parts.clone(),
        _ => return None,
    };
    if !parts
        .iter()
        .all(|p| p.occurs(var) && structurally_reduced(p, var) && copy_safe(p))
    {
        return None;
    }
    if args
        .iter()
        .enumerate()
        .any(|(i, a)| i != slot && !copy_safe(a))
    {
        return None;
    }
    let mut out = Vec::new();
    for p in parts {
        let mut new_args = args.clone();
        new_args[slot] = p;
        let new_app = if is_cross {
            Term::Cross {
                n,
                func: func.clone(),
                args: new_args,
            }
        } else {
            Term::Apply {
                func: func.clone(),
                args: new_args,
            }
        };
        out.push(Term::Lin {
            var: var.clone(),
            body: Box::new(Term::under_lin(&stack, new_app)),
        });
    }
    Some(Term::Sum(out))
}

// --- R5: diagonal contraction -------------------------------------------------

fn r5_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    let (var, body) = match t {
        Term::Lin { var, body } => (var, body.as_ref()),
        _ => return None,
    };
    let (_, app) = body.strip_lin();
    let args = match app {
        Term::Cross { args, .. } | Term::Apply { args, .. } => args,
        _ => return None,
    };
    let hits: Vec<&Term> = args.iter().filter(|a| a.occurs(var)).collect();
    if hits.len() < 2 {
        return None;
    }
    if hits.iter().all(|a| structurally_reduced(a, var)) {
        Some(Term::Zero)
    } else {
        None
    }
}

// --- R6: unreduced applications in cross-effect slots split -------------------

fn r6_local(t: &Term, ctx: Ctx) -> Option<Term> {
    let (func, args) = match t {
        Term::Apply { func, args } => (func, args),
        _ => return None,
    };
    // Composite applications unfold (R3) before their layers split.
    if func.is_reduced() || !matches!(func, Func::Atom(_)) {
        return None;
    }
    let splits_here = ctx.in_arg || args.iter().any(super::measure::sum_outside_lin);
    if !splits_here {
        return None;
    }
    Some(Term::Sum(vec![
        Term::ConstZero(func.clone()),
        Term::Cross {
            n: args.len(),
            func: func.clone(),
            args: args.clone(),
        },
    ]))
}

// --- R7a: push a marker through a reduced slot --------------------------------

fn r7a_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    let (var, body) = match t {
        Term::Lin { var, body } => (var, body.as_ref()),
        _ => return None,
    };
    let (stack, app) = body.strip_lin();
    type Rebuild = Box<dyn Fn(Vec<Term>) -> Term>;
    let (args, rebuild): (&Vec<Term>, Rebuild) = match app {
        Term::Cross { n, func, args } => {
            let (n, func) = (*n, func.clone());
            (
                args,
                Box::new(move |new_args| Term::Cross {
                    n,
                    func: func.clone(),
                    args: new_args,
                }),
            )
        }
        Term::Apply { func, args } => {
            let func = func.clone();
            (
                args,
                Box::new(move |new_args| Term::Apply {
                    func: func.clone(),
                    args: new_args,
                }),
            )
        }
        _ => return None,
    };
    let hits: Vec<usize> = (0..args.len()).filter(|&i| args[i].occurs(var)).collect();
    if hits.len() != 1 {
        return None;
    }
    let slot = hits[0];
    let c = &args[slot];
    // Sealed shapes: the bare variable, or a stack already carrying the marker.
    match c {
        Term::Obj(_) => return None,
        Term::Lin { .. } => {
            let (cstack, _) = c.strip_lin();
            if cstack.iter().any(|v| v == var) {
                return None;
            }
        }
        Term::Apply { .. } | Term::Cross { .. } => {}
        _ => return None,
    }
    // Sums inside the slot distribute first; pushing a marker over them
    // would bury them one level deeper.
    if c.occurs_sum() || !structurally_reduced(c, var) {
        return None;
    }
    let mut new_args = args.clone();
    new_args[slot] = canonicalize(&Term::Lin {
        var: var.clone(),
        body: Box::new(c.clone()),
    });
    if new_args[slot] == args[slot] {
        return None;
    }
    Some(Term::Lin {
        var: var.clone(),
        body: Box::new(Term::under_lin(&stack, rebuild(new_args))),
    })
}

// --- R7b: composition rule with correction summand ----------------------------

fn r7b_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    let (var, body) = match t {
        Term::Lin { var, body } => (var, body.as_ref()),
        _ => return None,
    };
    let (stack, app) = body.strip_lin();
    // Either a formal composite applied to an argument, or an unreduced
    // application sitting in the single slot of a plain application.
    let (outer, inner, inner_args) = match app {
        Term::Apply { func, args } => match func {
            Func::Compose(o, i) => (o.as_ref().clone(), i.as_ref().clone(), args.clone()),
            Func::Atom(_) => {
                if args.len() != 1 {
                    return None;
                }
                match &args[0] {
                    Term::Apply {
                        func: ifunc,
                        args: iargs,
                    } if !ifunc.is_reduced() => (func.clone(), ifunc.clone(), iargs.clone()),
                    _ => return None,
                }
            }
        },
        _ => return None,
    };
    let inner_app = Term::Apply {
        func: inner.clone(),
        args: inner_args.clone(),
    };
    if !inner_app.occurs(var) || !inner_args.iter().all(expandable_free) {
        return None;
    }
    let full_stack: Vec<VarName> = std::iter::once(var.clone()).chain(stack.clone()).collect();
    let composed = Term::under_lin(
        &full_stack,
        Term::Apply {
            func: outer.clone(),
            args: vec![Term::Lin {
                var: var.clone(),
                body: Box::new(inner_app.clone()),
            }],
        },
    );
    if inner.is_reduced() {
        return Some(composed);
    }
    let correction = Term::under_lin(
        &full_stack,
        Term::Cross {
            n: 2,
            func: outer,
            args: vec![
                Term::Cross {
                    n: inner_args.len(),
                    func: inner.clone(),
                    args: inner_args,
                },
                Term::ConstZero(inner),
            ],
        },
    );
    Some(Term::Sum(vec![composed, correction]))
}

// --- R8a: the linearization of a first cross effect ---------------------------

fn r8a_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    let (var, body) = match t {
        Term::Lin { var, body } => (var, body.as_ref()),
        _ => return None,
    };
    let _ = var;
    if let Term::Cross { n: 1, func, args } = body {
        let sealed = match &args[0] {
            Term::Obj(_) => true,
            c @ Term::Lin { .. } => {
                let (cstack, _) = c.strip_lin();
                !cstack.is_empty()
            }
            _ => false,
        };
        if sealed {
            return Some(Term::Lin {
                var: var.clone(),
                body: Box::new(Term::Apply {
                    func: func.clone(),
                    args: args.clone(),
                }),
            });
        }
    }
    None
}

// --- R8b: redundant markers collapse ------------------------------------------

fn r8b_local(t: &Term, ctx: Ctx) -> Option<Term> {
    // A linearized degree-0 argument is its degree-0 value.
    match t {
        Term::Apply { func, args } | Term::Cross { func, args, .. } => {
            let _ = func;
            for (i, a) in args.iter().enumerate() {
                if let Term::Lin { var, body } = a {
                    if matches!(body.as_ref(), Term::Obj(ObjectExpr::Var(v)) if v == var) {
                        let mut new_args = args.clone();
                        new_args[i] = body.as_ref().clone();
                        return Some(match t {
                            Term::Apply { func, .. } => Term::Apply {
                                func: func.clone(),
                                args: new_args,
                            },
                            Term::Cross { n, func, .. } => Term::Cross {
                                n: *n,
                                func: func.clone(),
                                args: new_args,
                            },
                            _ => unreachable!(),
                        });
                    }
                }
            }
        }
        _ => {}
    }
    // Stack canonicalization fires at the outermost marker of a stack.
    if ctx.parent_lin {
        return None;
    }
    let (stack, app) = t.strip_lin();
    if stack.len() < 2 {
        return None;
    }
    match app {
        Term::Apply { args, .. } | Term::Cross { args, .. } => {
            // Group markers by the single argument slot they target.
            let mut per_slot: Vec<Vec<&VarName>> = vec![Vec::new(); args.len()];
            for v in &stack {
                let hits: Vec<usize> = (0..args.len()).filter(|&i| args[i].occurs(v)).collect();
                if hits.len() != 1 {
                    return None;
                }
                per_slot[hits[0]].push(v);
            }
            let mut new_stack: Vec<VarName> = Vec::new();
            for (i, markers) in per_slot.iter().enumerate() {
                if markers.is_empty() {
                    continue;
                }
                // Only markers the slot has already absorbed may collapse: a
                // pending marker (not in the slot's own stack) belongs to a
                // composition step that has not fired yet.
                let cap: Vec<VarName> = match &args[i] {
                    Term::Obj(ObjectExpr::Var(v)) => vec![v.clone()],
                    c @ Term::Lin { .. } => c.strip_lin().0,
                    _ => return None,
                };
                if markers.iter().any(|m| !cap.contains(m)) {
                    return None;
                }
                let head = cap[0].clone();
                if !markers.iter().any(|m| **m == head) {
                    return None;
                }
                new_stack.push(head);
            }
            new_stack.sort();
            if new_stack == stack {
                return None;
            }
            Some(Term::under_lin(&new_stack, app.clone()))
        }
        Term::Obj(ObjectExpr::Var(v)) => {
            if stack.iter().all(|m| m == v) {
                Some(Term::Lin {
                    var: v.clone(),
                    body: Box::new(app.clone()),
                })
            } else {
                None
            }
        }
        _ => None,
    }
}

// --- R9: derivative expansion ---------------------------------------------------

fn r9_local(t: &Term, _ctx: Ctx) -> Option<Term> {
    match t {
        Term::Nabla {
            func,
            direction,
            basepoint,
        } => expand_delta(1, func, std::slice::from_ref(direction), basepoint),
        Term::Delta {
            order,
            func,
            directions,
            basepoint,
        } => expand_delta(*order, func, directions, basepoint),
        _ => None,
    }
}

/// Shared expansion of Δ₀, Δ₁ = ∇ and Δ₂; `None` when a direction is not a
/// plain variable (the caller validates and reports).
pub fn expand_delta(
    order: u8,
    func: &Func,
    directions: &[ObjectExpr],
    basepoint: &ObjectExpr,
) -> Option<Term> {
    if directions.len() != order as usize {
        return None;
    }
    let base = Term::Obj(basepoint.clone());
    match order {
        0 => Some(Term::Apply {
            func: func.clone(),
            args: vec![base],
        }),
        1 => {
            let v = match directions[0].canonicalize() {
                ObjectExpr::Var(v) => v,
                ObjectExpr::Zero => return Some(Term::Zero),
                ObjectExpr::Sum(..) => return None,
            };
            Some(Term::Sum(vec![
                Term::lin(
                    &v,
                    Term::Apply {
                        func: func.clone(),
                        args: vec![Term::var(&v)],
                    },
                ),
                Term::lin(
                    &v,
                    Term::Cross {
                        n: 2,
                        func: func.clone(),
                        args: vec![Term::var(&v), base],
                    },
                ),
            ]))
        }
        2 => {
            let w = match directions[0].canonicalize() {
                ObjectExpr::Var(v) => v,
                _ => return None,
            };
            let v = match directions[1].canonicalize() {
                ObjectExpr::Var(v) => v,
                _ => return None,
            };
            let mut taken: Vec<VarName> = vec![w.clone(), v.clone()];
            basepoint.vars(&mut taken);
            let mut vbar = alias_of(&v);
            while taken.contains(&vbar) {
                vbar = alias_of(&vbar);
            }
            Some(Term::Sum(vec![
                Term::lin(
                    &w,
                    Term::Apply {
                        func: func.clone(),
                        args: vec![Term::var(&w)],
                    },
                ),
                Term::lin(
                    &w,
                    Term::Cross {
                        n: 2,
                        func: func.clone(),
                        args: vec![Term::var(&w), base.clone()],
                    },
                ),
                Term::lin(
                    &v,
                    Term::lin(
                        &vbar,
                        Term::Cross {
                            n: 2,
                            func: func.clone(),
                            args: vec![Term::var(&v), Term::var(&vbar)],
                        },
                    ),
                ),
                Term::lin(
                    &v,
                    Term::lin(
                        &vbar,
                        Term::Cross {
                            n: 3,
                            func: func.clone(),
                            args: vec![Term::var(&v), Term::var(&vbar), base],
                        },
                    ),
                ),
            ]))
        }
        _ => None,
    }
}

impl Term {
    /// True when a direct sum occurs anywhere in the term.
    pub(crate) fn occurs_sum(&self) -> bool {
        match self {
            Term::Zero | Term::Obj(_) | Term::ConstZero(_) => false,
            Term::Apply { args, .. } | Term::Cross { args, .. } => {
                args.iter().any(|a| a.occurs_sum())
            }
            Term::Lin { body, .. } => body.occurs_sum(),
            Term::Sum(_) => true,
            Term::Nabla { .. } | Term::Delta { .. } => false,
        }
    }
}
