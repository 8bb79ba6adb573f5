//! Shared test support: a seeded random term generator.

use afcalc_core::term::{Func, FunctorAtom, ObjectExpr, Term};
use rand::rngs::StdRng;
use rand::Rng;

pub const VARS: [&str; 4] = ["v", "w", "x", "y"];

pub fn unary(name: &str) -> Func {
    Func::atom(FunctorAtom::abstract_unary(name))
}

fn random_func(rng: &mut StdRng, allow_composite: bool) -> Func {
    let roll = if allow_composite {
        rng.gen_range(0..6)
    } else {
        rng.gen_range(0..4)
    };
    match roll {
        0 => unary("F"),
        1 => unary("G"),
        2 => Func::atom(FunctorAtom::identity()),
        3 => unary("H"),
        4 => Func::compose(unary("F"), unary("G")),
        _ => Func::compose(unary("G"), Func::atom(FunctorAtom::identity())),
    }
}

fn random_var(rng: &mut StdRng) -> String {
    VARS[rng.gen_range(0..VARS.len())].to_string()
}

/// A well-formed random term of bounded depth over F, G, H, Id and the
/// variables v, w, x, y. Derivative nodes appear only at the top level, the
/// way the calculus uses them.
pub fn random_term(rng: &mut StdRng, depth: usize) -> Term {
    random_term_inner(rng, depth, true)
}

fn random_term_inner(rng: &mut StdRng, depth: usize, allow_derivatives: bool) -> Term {
    if depth == 0 {
        return match rng.gen_range(0..5) {
            0 => Term::Zero,
            1 => Term::ConstZero(unary("G")),
            _ => Term::var(&random_var(rng)),
        };
    }
    let roll = if allow_derivatives {
        rng.gen_range(0..10)
    } else {
        rng.gen_range(0..8)
    };
    match roll {
        0 => Term::var(&random_var(rng)),
        1 => Term::Obj(ObjectExpr::sum(
            ObjectExpr::var(&random_var(rng)),
            ObjectExpr::var(&random_var(rng)),
        )),
        2 => {
            let func = random_func(rng, allow_derivatives);
            // Composites are applied to objects, the way the calculus uses
            // them; their expansions over arbitrary towers explode.
            let arg_depth = if matches!(func, Func::Compose(..)) {
                0
            } else {
                depth.saturating_sub(2)
            };
            Term::Apply {
                func,
                args: vec![random_term_inner(rng, arg_depth, false)],
            }
        }
        3 | 4 => {
            let n = rng.gen_range(1..=3);
            let func = random_func(rng, allow_derivatives);
            let arg_depth = if matches!(func, Func::Compose(..)) {
                0
            } else {
                depth.saturating_sub(2)
            };
            let args = (0..n)
                .map(|_| random_term_inner(rng, arg_depth, false))
                .collect();
            Term::Cross { n, func, args }
        }
        5 | 6 => Term::Lin {
            var: random_var(rng),
            body: Box::new(random_term_inner(rng, depth - 1, false)),
        },
        7 => Term::Sum(vec![
            random_term_inner(rng, depth - 1, allow_derivatives),
            random_term_inner(rng, depth - 1, allow_derivatives),
        ]),
        8 => {
            let order = rng.gen_range(0..=2);
            let func = random_func(rng, true);
            let directions = (0..order)
                .map(|_| ObjectExpr::var(&random_var(rng)))
                .collect();
            Term::Delta {
                order,
                func,
                directions,
                basepoint: ObjectExpr::var("x"),
            }
        }
        _ => Term::Nabla {
            func: random_func(rng, true),
            direction: ObjectExpr::var(&random_var(rng)),
            basepoint: ObjectExpr::var(&random_var(rng)),
        },
    }
}
