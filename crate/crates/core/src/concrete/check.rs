//! Numerical validation of rewrite rules on concrete functors.
//!
//! A term whose linearization markers are outermost (one stack over an
//! application tree of cross effects, applications, variables and constants)
//! is evaluated to a truncated complex; two terms are compared by homology
//! dimensions below the truncation degree.

use super::complex::{bicomplex_total, linearization_complex_mf, ComplexRep};
use super::functor::{ConcreteError, ConcreteFunctor, MultiFunctor};
use crate::rewrite::RuleId;
use crate::term::{Func, ObjectExpr, Term, VarName};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::rc::Rc;

/// Concrete interpretations for functor names plus dimensions for variables.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    pub functors: BTreeMap<String, ConcreteFunctor>,
    pub dims: BTreeMap<String, usize>,
}

impl Assignment {
    pub fn with_functor(mut self, name: &str, f: ConcreteFunctor) -> Self {
        self.functors.insert(name.to_string(), f);
        self
    }

    pub fn with_dim(mut self, var: &str, d: usize) -> Self {
        self.dims.insert(var.to_string(), d);
        self
    }
}

/// Evaluation result: a complex, or the reason the shape is unsupported.
#[derive(Debug)]
pub enum EvalOutcome {
    Complex(ComplexRep),
    Unsupported(String),
}

fn func_to_concrete(f: &Func, asg: &Assignment) -> Result<ConcreteFunctor, String> {
    match f {
        Func::Atom(a) => {
            if a.role == crate::term::Role::Identity {
                return Ok(ConcreteFunctor::Identity);
            }
            asg.functors
                .get(&a.name)
                .cloned()
                .ok_or_else(|| format!("no concrete functor assigned to `{}`", a.name))
        }
        Func::Compose(o, i) => Ok(ConcreteFunctor::compose(
            func_to_concrete(o, asg)?,
            func_to_concrete(i, asg)?,
        )),
    }
}

fn term_to_mf(t: &Term, linvars: &[VarName], asg: &Assignment) -> Result<Rc<MultiFunctor>, String> {
    let arity = linvars.len().max(1);
    match t {
        Term::Zero => Ok(Rc::new(MultiFunctor::ConstDim { arity, dim: 0 })),
        Term::Obj(ObjectExpr::Var(v)) => {
            if let Some(slot) = linvars.iter().position(|u| u == v) {
                Ok(Rc::new(MultiFunctor::Proj { arity, slot }))
            } else {
                let d = *asg
                    .dims
                    .get(v)
                    .ok_or_else(|| format!("no dimension assigned to `{v}`"))?;
                Ok(Rc::new(MultiFunctor::ConstDim { arity, dim: d }))
            }
        }
        Term::ConstZero(f) => {
            let cf = func_to_concrete(f, asg)?;
            Ok(Rc::new(MultiFunctor::ConstDim {
                arity,
                dim: cf.dim(0),
            }))
        }
        Term::Apply { func, args } => {
            if args.len() != 1 {
                return Err("only unary applications evaluate".to_string());
            }
            let outer = Rc::new(MultiFunctor::Plain(Rc::new(func_to_concrete(func, asg)?)));
            let inner = term_to_mf(&args[0], linvars, asg)?;
            Ok(Rc::new(MultiFunctor::Tuple {
                outer,
                inners: vec![inner],
            }))
        }
        Term::Cross { n, func, args } => {
            let outer = Rc::new(MultiFunctor::CrossOf {
                f: Rc::new(func_to_concrete(func, asg)?),
                n: *n,
            });
            let inners = args
                .iter()
                .map(|a| term_to_mf(a, linvars, asg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Rc::new(MultiFunctor::Tuple { outer, inners }))
        }
        Term::Sum(parts) => {
            let parts = parts
                .iter()
                .map(|p| term_to_mf(p, linvars, asg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Rc::new(MultiFunctor::SumOf { parts }))
        }
        Term::Lin { .. } => Err("inner linearization markers are not evaluable; \
             reduce the term symbolically first"
            .to_string()),
        other => Err(format!("shape {other:?} is not evaluable")),
    }
}

/// Evaluates one summand (a linearization stack over an application) to a
/// complex truncated at `top`.
fn summand_complex(t: &Term, asg: &Assignment, top: usize) -> Result<EvalOutcome, ConcreteError> {
    let (stack, body) = t.strip_lin();
    let mut linvars: Vec<VarName> = Vec::new();
    for v in &stack {
        if linvars.contains(v) {
            return Ok(EvalOutcome::Unsupported(format!(
                "repeated marker `{v}` (iterated linearization in one variable)"
            )));
        }
        linvars.push(v.clone());
    }
    let mf = match term_to_mf(body, &linvars, asg) {
        Ok(mf) => mf,
        Err(reason) => return Ok(EvalOutcome::Unsupported(reason)),
    };
    let dims: Vec<usize> = match linvars
        .iter()
        .map(|v| asg.dims.get(v).copied().ok_or(v.clone()))
        .collect::<Result<Vec<usize>, _>>()
    {
        Ok(ds) => ds,
        Err(v) => return Ok(EvalOutcome::Unsupported(format!("no dimension for `{v}`"))),
    };
    let complex = match linvars.len() {
        // No markers: the value is a space concentrated in degree zero; the
        // functor is constant, so the dummy slot dimension is irrelevant.
        0 => ComplexRep::concentrated(mf.dim(&[0]), top),
        1 => linearization_complex_mf(&mf, 0, &dims, top)?,
        2 => bicomplex_total(&mf, &dims, top)?,
        n => {
            return Ok(EvalOutcome::Unsupported(format!(
                "{n} linearization markers (at most two are evaluable)"
            )))
        }
    };
    Ok(EvalOutcome::Complex(complex))
}

/// Evaluates a term (a direct sum of summands) to a complex.
pub fn term_complex(t: &Term, asg: &Assignment, top: usize) -> Result<EvalOutcome, ConcreteError> {
    let t = crate::term::canonicalize(t);
    let mut acc = ComplexRep::zero(top);
    for s in t.summands() {
        match summand_complex(&s, asg, top)? {
            EvalOutcome::Complex(c) => acc = acc.direct_sum(&c),
            unsupported => return Ok(unsupported),
        }
    }
    Ok(EvalOutcome::Complex(acc))
}

/// Per-degree comparison of the two sides of a rule instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleCheckReport {
    pub rule: RuleId,
    pub supported: bool,
    pub reason: Option<String>,
    /// (degree, lhs homology dim, rhs homology dim) for degrees below the
    /// truncation.
    pub degrees: Vec<(usize, usize, usize)>,
    pub equal: bool,
}

/// Evaluates both sides of a rule instance and compares homology dimensions
/// in degrees below the truncation.
pub fn check_rule_concrete(
    rule: RuleId,
    lhs: &Term,
    rhs: &Term,
    asg: &Assignment,
    top: usize,
) -> Result<RuleCheckReport, ConcreteError> {
    let l = term_complex(lhs, asg, top)?;
    let r = term_complex(rhs, asg, top)?;
    match (l, r) {
        (EvalOutcome::Complex(cl), EvalOutcome::Complex(cr)) => {
            let hl = cl.homology_dims();
            let hr = cr.homology_dims();
            let degrees: Vec<(usize, usize, usize)> = hl
                .iter()
                .zip(hr.iter())
                .enumerate()
                .map(|(k, (a, b))| (k, *a, *b))
                .collect();
            let equal = hl == hr;
            Ok(RuleCheckReport {
                rule,
                supported: true,
                reason: None,
                degrees,
                equal,
            })
        }
        (EvalOutcome::Unsupported(reason), _) | (_, EvalOutcome::Unsupported(reason)) => {
            Ok(RuleCheckReport {
                rule,
                supported: false,
                reason: Some(reason),
                degrees: Vec::new(),
                equal: false,
            })
        }
    }
}
