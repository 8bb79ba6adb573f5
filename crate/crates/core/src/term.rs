//! Expression grammar for objects and applied functor terms.
//!
//! Terms are immutable trees. A `Term` in canonical form has flattened,
//! sorted direct sums, sorted cross-effect argument lists, sorted stacks of
//! linearization markers, zero-pruned object sums, and constants-at-zero in
//! the dedicated [`Term::ConstZero`] shape. The derived `Ord` on canonical
//! terms is the global total order used everywhere: multisets of summands are
//! kept as sorted vectors, so equal normal forms compare bit-identically.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Variable names are drawn from a declared context (`x`, `v`, `w`, `vbar`, ...).
pub type VarName = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("cross effect of arity {expected} applied to {got} arguments")]
    ArityMismatch { expected: usize, got: usize },
    #[error("functor {name} has arity {expected} but was applied to {got} arguments")]
    ApplyArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("alias map contains a cycle through `{0}`")]
    CyclicAliases(String),
    #[error("direction of an order-{0} derivative must be a plain variable")]
    DirectionNotVariable(u8),
    #[error("order-{order} derivative expects {order} directions, got {got}")]
    DirectionCount { order: u8, got: usize },
}

/// What kind of functor an atom stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    /// An arbitrary abelian functor such as `F` or `G`.
    Abstract,
    /// The identity functor; arity 1, strictly reduced, vanishing higher
    /// cross effects.
    Identity,
}

/// A named functor symbol together with the structure the rules may use.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FunctorAtom {
    pub name: String,
    pub arity: usize,
    /// Whether the functor is reduced (sends the zero object to zero).
    pub reduced: bool,
    pub role: Role,
}

impl FunctorAtom {
    pub fn abstract_unary(name: &str) -> Self {
        FunctorAtom {
            name: name.to_string(),
            arity: 1,
            reduced: false,
            role: Role::Abstract,
        }
    }

    pub fn reduced_unary(name: &str) -> Self {
        FunctorAtom {
            name: name.to_string(),
            arity: 1,
            reduced: true,
            role: Role::Abstract,
        }
    }

    pub fn identity() -> Self {
        FunctorAtom {
            name: "Id".to_string(),
            arity: 1,
            reduced: true,
            role: Role::Identity,
        }
    }
}

/// A functor expression: an atom or a formal composite `outer ∘ inner`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Func {
    Atom(FunctorAtom),
    Compose(Box<Func>, Box<Func>),
}

impl Func {
    pub fn atom(a: FunctorAtom) -> Self {
        Func::Atom(a)
    }

    pub fn compose(outer: Func, inner: Func) -> Self {
        Func::Compose(Box::new(outer), Box::new(inner))
    }

    /// Number of `Compose` nodes, used by the termination measure.
    pub fn compose_count(&self) -> usize {
        match self {
            Func::Atom(_) => 0,
            Func::Compose(o, i) => 1 + o.compose_count() + i.compose_count(),
        }
    }

    /// Structural reducedness: does the functor send 0 to 0 on the nose?
    pub fn is_reduced(&self) -> bool {
        match self {
            Func::Atom(a) => a.reduced,
            Func::Compose(o, i) => i.is_reduced() && o.is_reduced(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Func::Atom(a) => a.arity,
            // A formal composite is applied like its outer functor after the
            // inner one has consumed the argument; both are unary in practice.
            Func::Compose(o, _) => o.arity(),
        }
    }

    pub fn atom_names(&self, out: &mut Vec<String>) {
        match self {
            Func::Atom(a) => out.push(a.name.clone()),
            Func::Compose(o, i) => {
                o.atom_names(out);
                i.atom_names(out);
            }
        }
    }

    fn leaves(&self, out: &mut Vec<Func>) {
        match self {
            Func::Atom(_) => out.push(self.clone()),
            Func::Compose(o, i) => {
                o.leaves(out);
                i.leaves(out);
            }
        }
    }

    /// Canonical form of a composite chain: left-nested, so the innermost
    /// functor is always an atom.
    pub fn canonical(&self) -> Func {
        let mut leaves = Vec::new();
        self.leaves(&mut leaves);
        let mut it = leaves.into_iter();
        let first = it.next().expect("a functor expression has a leaf");
        it.fold(first, Func::compose)
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Func::Atom(a) => write!(f, "{}", a.name),
            Func::Compose(o, i) => write!(f, "({} o {})", o, i),
        }
    }
}

/// A formal object of the ambient abelian category.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObjectExpr {
    Zero,
    Var(VarName),
    Sum(Box<ObjectExpr>, Box<ObjectExpr>),
}

impl ObjectExpr {
    pub fn var(name: &str) -> Self {
        ObjectExpr::Var(name.to_string())
    }

    pub fn sum(left: ObjectExpr, right: ObjectExpr) -> Self {
        ObjectExpr::Sum(Box::new(left), Box::new(right))
    }

    fn collect_parts(&self, out: &mut Vec<ObjectExpr>) {
        match self {
            ObjectExpr::Zero => {}
            ObjectExpr::Var(_) => out.push(self.clone()),
            ObjectExpr::Sum(l, r) => {
                l.collect_parts(out);
                r.collect_parts(out);
            }
        }
    }

    /// Canonical form: right-nested sum of sorted non-zero operands.
    pub fn canonicalize(&self) -> ObjectExpr {
        let mut parts = Vec::new();
        self.collect_parts(&mut parts);
        parts.sort();
        let mut iter = parts.into_iter().rev();
        match iter.next() {
            None => ObjectExpr::Zero,
            Some(last) => iter.fold(last, |acc, x| ObjectExpr::sum(x, acc)),
        }
    }

    pub fn vars(&self, out: &mut Vec<VarName>) {
        match self {
            ObjectExpr::Zero => {}
            ObjectExpr::Var(v) => out.push(v.clone()),
            ObjectExpr::Sum(l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }

    fn rename(&self, map: &BTreeMap<VarName, VarName>) -> ObjectExpr {
        match self {
            ObjectExpr::Zero => ObjectExpr::Zero,
            ObjectExpr::Var(v) => ObjectExpr::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            ObjectExpr::Sum(l, r) => ObjectExpr::sum(l.rename(map), r.rename(map)),
        }
    }
}

/// An applied functor expression.
///
/// The variant declaration order is load-bearing: the derived `Ord` is the
/// global total order on canonical terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    /// The zero object / zero functor value.
    Zero,
    /// An object expression used in argument position.
    Obj(ObjectExpr),
    /// `F(0)`: the constant value of a functor at the zero object.
    ConstZero(Func),
    /// Plain application `F(x₁, …)`; possibly unreduced.
    Apply { func: Func, args: Vec<Term> },
    /// `cr_n F(x₁, …, x_n)`: the n-th cross effect.
    Cross {
        n: usize,
        func: Func,
        args: Vec<Term>,
    },
    /// `D₁^{var} body`: simultaneous linearization of every occurrence of
    /// `var` in `body`. Slot-indexed linearizations are encoded by giving the
    /// slot a variable of its own (the `vbar` device).
    Lin { var: VarName, body: Box<Term> },
    /// Direct sum of terms; canonical form is flat, sorted, without zeros.
    Sum(Vec<Term>),
    /// `∇F(direction; basepoint)`, unexpanded.
    Nabla {
        func: Func,
        direction: ObjectExpr,
        basepoint: ObjectExpr,
    },
    /// `Δ_order F(directions; basepoint)`, unexpanded.
    Delta {
        order: u8,
        func: Func,
        directions: Vec<ObjectExpr>,
        basepoint: ObjectExpr,
    },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Obj(ObjectExpr::var(name))
    }

    pub fn apply(func: Func, args: Vec<Term>) -> Term {
        Term::Apply { func, args }
    }

    pub fn cross(n: usize, func: Func, args: Vec<Term>) -> Result<Term, TermError> {
        if args.len() != n || n == 0 {
            return Err(TermError::ArityMismatch {
                expected: n,
                got: args.len(),
            });
        }
        Ok(Term::Cross { n, func, args })
    }

    pub fn lin(var: &str, body: Term) -> Term {
        Term::Lin {
            var: var.to_string(),
            body: Box::new(body),
        }
    }

    pub fn sum(summands: Vec<Term>) -> Term {
        canonicalize(&Term::Sum(summands))
    }

    /// Splits a canonical term into its top-level summands.
    pub fn summands(&self) -> Vec<Term> {
        match self {
            Term::Zero => Vec::new(),
            Term::Sum(ts) => ts.clone(),
            other => vec![other.clone()],
        }
    }

    /// Strips the outermost stack of linearization markers.
    pub fn strip_lin(&self) -> (Vec<VarName>, &Term) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Term::Lin { var, body } = cur {
            vars.push(var.clone());
            cur = body;
        }
        (vars, cur)
    }

    /// Rebuilds a term under a stack of linearization markers.
    pub fn under_lin(vars: &[VarName], body: Term) -> Term {
        vars.iter().rev().fold(body, |acc, v| Term::Lin {
            var: v.clone(),
            body: Box::new(acc),
        })
    }

    /// True when `var` occurs as a free object variable.
    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Zero | Term::ConstZero(_) => false,
            Term::Obj(o) => {
                let mut vs = Vec::new();
                o.vars(&mut vs);
                vs.iter().any(|v| v == var)
            }
            Term::Apply { args, .. } | Term::Cross { args, .. } => {
                args.iter().any(|a| a.occurs(var))
            }
            Term::Lin { body, .. } => body.occurs(var),
            Term::Sum(ts) => ts.iter().any(|t| t.occurs(var)),
            Term::Nabla {
                direction,
                basepoint,
                ..
            } => {
                let mut vs = Vec::new();
                direction.vars(&mut vs);
                basepoint.vars(&mut vs);
                vs.iter().any(|v| v == var)
            }
            Term::Delta {
                directions,
                basepoint,
                ..
            } => {
                let mut vs = Vec::new();
                for d in directions {
                    d.vars(&mut vs);
                }
                basepoint.vars(&mut vs);
                vs.iter().any(|v| v == var)
            }
        }
    }

    /// All free object variables, sorted and deduplicated.
    pub fn free_vars(&self) -> Vec<VarName> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarName>) {
        match self {
            Term::Zero | Term::ConstZero(_) => {}
            Term::Obj(o) => o.vars(out),
            Term::Apply { args, .. } | Term::Cross { args, .. } => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            Term::Lin { body, .. } => body.collect_vars(out),
            Term::Sum(ts) => {
                for t in ts {
                    t.collect_vars(out);
                }
            }
            Term::Nabla {
                direction,
                basepoint,
                ..
            } => {
                direction.vars(out);
                basepoint.vars(out);
            }
            Term::Delta {
                directions,
                basepoint,
                ..
            } => {
                for d in directions {
                    d.vars(out);
                }
                basepoint.vars(out);
            }
        }
    }

    /// Multiset of functor atom names occurring anywhere in the term,
    /// including inside composites and constants-at-zero.
    pub fn atom_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out.sort();
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Term::Zero | Term::Obj(_) => {}
            Term::ConstZero(f) => f.atom_names(out),
            Term::Apply { func, args } | Term::Cross { func, args, .. } => {
                func.atom_names(out);
                for a in args {
                    a.collect_atoms(out);
                }
            }
            Term::Lin { body, .. } => body.collect_atoms(out),
            Term::Sum(ts) => {
                for t in ts {
                    t.collect_atoms(out);
                }
            }
            Term::Nabla { func, .. } => func.atom_names(out),
            Term::Delta { func, .. } => func.atom_names(out),
        }
    }

    /// An atomic summand contains no sum, zero, composite, nabla or delta
    /// nodes; these are the members of a normal form's multiset.
    pub fn is_atomic_summand(&self) -> bool {
        match self {
            Term::Zero | Term::Sum(_) | Term::Nabla { .. } | Term::Delta { .. } => false,
            Term::Obj(o) => !matches!(o, ObjectExpr::Zero | ObjectExpr::Sum(..)),
            Term::ConstZero(f) => matches!(f, Func::Atom(_)),
            Term::Apply { func, args } | Term::Cross { func, args, .. } => {
                matches!(func, Func::Atom(_)) && args.iter().all(|a| a.is_atomic_summand())
            }
            Term::Lin { body, .. } => body.is_atomic_summand(),
        }
    }

    /// Renames free variables and linearization markers according to `map`.
    pub fn rename_vars(&self, map: &BTreeMap<VarName, VarName>) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::ConstZero(f) => Term::ConstZero(f.clone()),
            Term::Obj(o) => Term::Obj(o.rename(map)),
            Term::Apply { func, args } => Term::Apply {
                func: func.clone(),
                args: args.iter().map(|a| a.rename_vars(map)).collect(),
            },
            Term::Cross { n, func, args } => Term::Cross {
                n: *n,
                func: func.clone(),
                args: args.iter().map(|a| a.rename_vars(map)).collect(),
            },
            Term::Lin { var, body } => Term::Lin {
                var: map.get(var).cloned().unwrap_or_else(|| var.clone()),
                body: Box::new(body.rename_vars(map)),
            },
            Term::Sum(ts) => Term::Sum(ts.iter().map(|t| t.rename_vars(map)).collect()),
            Term::Nabla {
                func,
                direction,
                basepoint,
            } => Term::Nabla {
                func: func.clone(),
                direction: direction.rename(map),
                basepoint: basepoint.rename(map),
            },
            Term::Delta {
                order,
                func,
                directions,
                basepoint,
            } => Term::Delta {
                order: *order,
                func: func.clone(),
                directions: directions.iter().map(|d| d.rename(map)).collect(),
                basepoint: basepoint.rename(map),
            },
        }
    }

    /// Substitutes an object expression for every free occurrence of `var`.
    pub fn subst_obj(&self, var: &str, value: &ObjectExpr) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::ConstZero(f) => Term::ConstZero(f.clone()),
            Term::Obj(o) => Term::Obj(subst_in_obj(o, var, value)),
            Term::Apply { func, args } => Term::Apply {
                func: func.clone(),
                args: args.iter().map(|a| a.subst_obj(var, value)).collect(),
            },
            Term::Cross { n, func, args } => Term::Cross {
                n: *n,
                func: func.clone(),
                args: args.iter().map(|a| a.subst_obj(var, value)).collect(),
            },
            Term::Lin { var: v, body } => Term::Lin {
                var: v.clone(),
                body: Box::new(body.subst_obj(var, value)),
            },
            Term::Sum(ts) => Term::Sum(ts.iter().map(|t| t.subst_obj(var, value)).collect()),
            Term::Nabla {
                func,
                direction,
                basepoint,
            } => Term::Nabla {
                func: func.clone(),
                direction: subst_in_obj(direction, var, value),
                basepoint: subst_in_obj(basepoint, var, value),
            },
            Term::Delta {
                order,
                func,
                directions,
                basepoint,
            } => Term::Delta {
                order: *order,
                func: func.clone(),
                directions: directions
                    .iter()
                    .map(|d| subst_in_obj(d, var, value))
                    .collect(),
                basepoint: subst_in_obj(basepoint, var, value),
            },
        }
    }
}

fn subst_in_obj(o: &ObjectExpr, var: &str, value: &ObjectExpr) -> ObjectExpr {
    match o {
        ObjectExpr::Zero => ObjectExpr::Zero,
        ObjectExpr::Var(v) if v == var => value.clone(),
        ObjectExpr::Var(v) => ObjectExpr::Var(v.clone()),
        ObjectExpr::Sum(l, r) => {
            ObjectExpr::sum(subst_in_obj(l, var, value), subst_in_obj(r, var, value))
        }
    }
}

/// Canonicalizes a term: associativity/commutativity of ⊕ (flattened, sorted,
/// zero-pruned sums), sorted cross-effect arguments, sorted stacks of
/// linearization markers, object sums lifted to term sums in argument
/// position, and constants-at-zero in `ConstZero` shape. Idempotent, and it
/// preserves the multiset of functor atom occurrences.
pub fn canonicalize(t: &Term) -> Term {
    match t {
        Term::Zero => Term::Zero,
        Term::ConstZero(f) => canon_const_zero(f),
        Term::Obj(o) => match o.canonicalize() {
            ObjectExpr::Zero => Term::Zero,
            ObjectExpr::Var(v) => Term::Obj(ObjectExpr::Var(v)),
            sum @ ObjectExpr::Sum(..) => {
                // Lift object-level sums so ⊕ has a single representation.
                let mut parts = Vec::new();
                sum.collect_parts(&mut parts);
                canon_sum(parts.into_iter().map(Term::Obj).collect())
            }
        },
        Term::Apply { func, args } => {
            let func = func.canonical();
            let args: Vec<Term> = args.iter().map(canonicalize).collect();
            if !args.is_empty() && args.iter().all(|a| matches!(a, Term::Zero)) {
                canon_const_zero(&func)
            } else {
                Term::Apply { func, args }
            }
        }
        Term::Cross { n, func, args } => {
            let mut args: Vec<Term> = args.iter().map(canonicalize).collect();
            args.sort();
            Term::Cross {
                n: *n,
                func: func.canonical(),
                args,
            }
        }
        Term::Lin { .. } => {
            let (mut vars, base) = t.strip_lin();
            let body = canonicalize(base);
            if matches!(body, Term::Zero) {
                return Term::Zero;
            }
            // Re-canonicalize if the body collapsed to a further Lin stack.
            let (inner_vars, inner) = body.strip_lin();
            vars.extend(inner_vars);
            vars.sort();
            Term::under_lin(&vars, inner.clone())
        }
        Term::Sum(ts) => canon_sum(ts.clone()),
        Term::Nabla {
            func,
            direction,
            basepoint,
        } => Term::Nabla {
            func: func.canonical(),
            direction: direction.canonicalize(),
            basepoint: basepoint.canonicalize(),
        },
        Term::Delta {
            order,
            func,
            directions,
            basepoint,
        } => Term::Delta {
            order: *order,
            func: func.canonical(),
            directions: directions.iter().map(|d| d.canonicalize()).collect(),
            basepoint: basepoint.canonicalize(),
        },
    }
}

fn canon_const_zero(f: &Func) -> Term {
    let f = f.canonical();
    match &f {
        Func::Atom(_) => Term::ConstZero(f.clone()),
        // (F ∘ G)(0) = F(G(0)).
        Func::Compose(o, i) => canonicalize(&Term::Apply {
            func: (**o).clone(),
            args: vec![canon_const_zero(i)],
        }),
    }
}

fn canon_sum(ts: Vec<Term>) -> Term {
    let mut flat = Vec::new();
    for t in ts {
        match canonicalize(&t) {
            Term::Zero => {}
            Term::Sum(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    flat.sort();
    match flat.len() {
        0 => Term::Zero,
        1 => flat.pop().unwrap(),
        _ => Term::Sum(flat),
    }
}

/// Replaces every aliased variable by its target (resolving chains) and
/// canonicalizes. Distinct linearization markers are retained; only the
/// variable names merge.
pub fn collapse_aliases(t: &Term, aliases: &BTreeMap<VarName, VarName>) -> Result<Term, TermError> {
    let mut resolved: BTreeMap<VarName, VarName> = BTreeMap::new();
    for key in aliases.keys() {
        let mut seen = vec![key.clone()];
        let mut cur = key.clone();
        while let Some(next) = aliases.get(&cur) {
            if seen.contains(next) {
                return Err(TermError::CyclicAliases(key.clone()));
            }
            seen.push(next.clone());
            cur = next.clone();
        }
        resolved.insert(key.clone(), cur);
    }
    Ok(canonicalize(&t.rename_vars(&resolved)))
}

/// The alias used for the duplicated direction of a second derivative.
pub fn alias_of(var: &str) -> VarName {
    format!("{var}bar")
}
