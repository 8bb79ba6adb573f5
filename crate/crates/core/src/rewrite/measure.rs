//! Termination measure.
//!
//! Each summand is scored by a lexicographic tuple that every rule strictly
//! decreases (in the multiset extension when a summand splits):
//!
//! 1. composite, nabla and delta nodes;
//! 2. depth-weighted direct sums plus depth-weighted splittable
//!    applications (unreduced applications in cross-effect slots or with a
//!    sum in their arguments);
//! 3. unsealed marker/application pairs (positions a linearization has not
//!    yet been pushed into);
//! 4. unit cross effects;
//! 5. node count.
//!
//! The driver asserts the decrease on every trace step.

use crate::term::{Func, Term};

pub type Measure = (usize, u128, usize, usize, usize);

pub fn measure(t: &Term) -> Measure {
    (
        m1_expandable(t),
        m2_splittable(t),
        m3_unsealed(t),
        m4_unit_cross(t),
        m5_nodes(t),
    )
}

fn func_composes(f: &Func) -> usize {
    f.compose_count()
}

/// Composite/nabla/delta nodes. Composites inside a constant-at-zero do not
/// count (canonicalization unfolds those).
fn m1_expandable(t: &Term) -> usize {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) => 0,
        Term::Apply { func, args } | Term::Cross { func, args, .. } => {
            func_composes(func) + args.iter().map(m1_expandable).sum::<usize>()
        }
        Term::Lin { body, .. } => m1_expandable(body),
        Term::Sum(ts) => ts.iter().map(m1_expandable).sum(),
        // Expanding a derivative copies its functor into up to four
        // summands, so the node must outweigh the copies.
        Term::Nabla { func, .. } => 1 + 4 * func_composes(func),
        Term::Delta { func, .. } => 1 + 4 * func_composes(func),
    }
}

/// Is this application a splitting candidate: unreduced and either sitting
/// in an argument subtree not shielded by a marker (`in_arg`) or containing
/// a direct sum?
fn apply_is_splittable(func: &Func, args: &[Term], in_arg: bool) -> bool {
    if func.is_reduced() || !matches!(func, Func::Atom(_)) {
        return false;
    }
    in_arg || args.iter().any(sum_outside_lin)
}

/// A direct sum not shielded by a linearization marker.
pub(crate) fn sum_outside_lin(t: &Term) -> bool {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) | Term::Lin { .. } => false,
        Term::Apply { args, .. } | Term::Cross { args, .. } => args.iter().any(sum_outside_lin),
        Term::Sum(_) => true,
        Term::Nabla { .. } | Term::Delta { .. } => false,
    }
}

/// Depth-weighted sums and splittable applications. `depth` counts apply,
/// cross and lin ancestors; `in_arg` tracks whether the position lies in an
/// application argument subtree with no marker in between (a marker turns
/// the application into a linearization, which the splitting rules leave
/// alone).
fn m2_splittable(t: &Term) -> u128 {
    m2_walk(t, 1, false)
}

/// Splitting a nested application exposes its parent as a new redex one
/// level up, so weights grow geometrically with depth: a sum at depth d
/// weighs 3^d, a splittable application 2·3^d. `weight` carries 3^depth.
fn m2_walk(t: &Term, weight: u128, in_arg: bool) -> u128 {
    let deeper = weight.saturating_mul(3);
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) => 0,
        Term::Apply { func, args } => {
            let own = if apply_is_splittable(func, args, in_arg) {
                2u128.saturating_mul(weight)
            } else {
                0
            };
            own.saturating_add(
                args.iter()
                    .map(|a| m2_walk(a, deeper, true))
                    .fold(0u128, u128::saturating_add),
            )
        }
        Term::Cross { args, .. } => args
            .iter()
            .map(|a| m2_walk(a, deeper, true))
            .fold(0u128, u128::saturating_add),
        Term::Lin { body, .. } => m2_walk(body, deeper, false),
        Term::Sum(ts) => weight.saturating_add(
            ts.iter()
                .map(|s| m2_walk(s, weight, in_arg))
                .fold(0u128, u128::saturating_add),
        ),
        Term::Nabla { .. } | Term::Delta { .. } => 0,
    }
}

/// Counts, per linearization marker, the application nodes on paths to the
/// marker's variable that the marker has not been pushed into. A path into
/// an argument is sealed when the argument is the bare variable or a stack
/// of markers whose variables include the marker's.
fn m3_unsealed(t: &Term) -> usize {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) => 0,
        Term::Apply { args, .. } | Term::Cross { args, .. } => args.iter().map(m3_unsealed).sum(),
        Term::Lin { var, body } => unsealed_for(var, body) + m3_unsealed(body),
        Term::Sum(ts) => ts.iter().map(m3_unsealed).sum(),
        Term::Nabla { .. } | Term::Delta { .. } => 0,
    }
}

fn unsealed_for(var: &str, t: &Term) -> usize {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) => 0,
        Term::Apply { args, .. } | Term::Cross { args, .. } => {
            let mut count = 0;
            for arg in args {
                if !arg.occurs(var) {
                    continue;
                }
                let sealed = match arg {
                    Term::Obj(_) => true,
                    Term::Lin { .. } => {
                        let (stack, _) = arg.strip_lin();
                        stack.iter().any(|v| v == var)
                    }
                    _ => false,
                };
                // Occurrences beneath a seal belong to the sealing marker.
                if !sealed {
                    count += 1 + unsealed_for(var, arg);
                }
            }
            count
        }
        Term::Lin { body, .. } => unsealed_for(var, body),
        Term::Sum(ts) => ts.iter().map(|s| unsealed_for(var, s)).sum(),
        Term::Nabla { .. } | Term::Delta { .. } => 0,
    }
}

fn m4_unit_cross(t: &Term) -> usize {
    match t {
        Term::Zero | Term::Obj(_) | Term::ConstZero(_) => 0,
        Term::Apply { args, .. } => args.iter().map(m4_unit_cross).sum(),
        Term::Cross { n, args, .. } => {
            usize::from(*n == 1) + args.iter().map(m4_unit_cross).sum::<usize>()
        }
        Term::Lin { body, .. } => m4_unit_cross(body),
        Term::Sum(ts) => ts.iter().map(m4_unit_cross).sum(),
        Term::Nabla { .. } | Term::Delta { .. } => 0,
    }
}

fn m5_nodes(t: &Term) -> usize {
    1 + match t {
        Term::Zero | Term::Obj(_) => 0,
        // A constant-at-zero still carries a functor, so rewriting it to the
        // zero object must shrink the count.
        Term::ConstZero(_) => 1,
        Term::Apply { args, .. } | Term::Cross { args, .. } => args.iter().map(m5_nodes).sum(),
        Term::Lin { body, .. } => m5_nodes(body),
        Term::Sum(ts) => ts.iter().map(m5_nodes).sum(),
        Term::Nabla { .. } | Term::Delta { .. } => 1,
    }
}
