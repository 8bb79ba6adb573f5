//! Honest polynomial functors on finite-dimensional rational spaces.
//!
//! A [`ConcreteFunctor`] is a combinator tree with an object map (dimension
//! to dimension) and a morphism map (matrix to matrix), functorial on the
//! nose. Cross effects are realized as images of exact inclusion–exclusion
//! idempotents; [`MultiFunctor`] wraps them as honest multi-variable
//! functors so towers of slot-wise operations can be built on top.

use super::matrix::{Mat, Rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConcreteError {
    #[error("matrix dimensions {got} do not match the expected object dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown functor spec `{0}`")]
    UnknownSpec(String),
    #[error("idempotent is not exact: e·e ≠ e")]
    NotIdempotent,
}

/// Combinator tree for a polynomial functor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConcreteFunctor {
    /// Constant functor at a space of the given dimension.
    Constant(usize),
    Identity,
    /// x ↦ x^{⊗n}.
    TensorPower(usize),
    /// x ↦ Sym^n x, split off the tensor power by the symmetrization
    /// idempotent (characteristic zero).
    SymPower(usize),
    DirectSum(Box<ConcreteFunctor>, Box<ConcreteFunctor>),
    /// `Compose(f, g)` is x ↦ f(g(x)).
    Compose(Box<ConcreteFunctor>, Box<ConcreteFunctor>),
}

impl ConcreteFunctor {
    fn write_key(&self, out: &mut String) {
        match self {
            ConcreteFunctor::Constant(c) => {
                let _ = write!(out, "c{c}");
            }
            ConcreteFunctor::Identity => out.push('i'),
            ConcreteFunctor::TensorPower(n) => {
                let _ = write!(out, "t{n}");
            }
            ConcreteFunctor::SymPower(n) => {
                let _ = write!(out, "y{n}");
            }
            ConcreteFunctor::DirectSum(f, g) => {
                out.push('(');
                f.write_key(out);
                out.push('+');
                g.write_key(out);
                out.push(')');
            }
            ConcreteFunctor::Compose(f, g) => {
                out.push('(');
                f.write_key(out);
                out.push('.');
                g.write_key(out);
                out.push(')');
            }
        }
    }

    pub fn tensor(n: usize) -> Self {
        ConcreteFunctor::TensorPower(n)
    }

    pub fn sym(n: usize) -> Self {
        ConcreteFunctor::SymPower(n)
    }

    pub fn sum(f: ConcreteFunctor, g: ConcreteFunctor) -> Self {
        ConcreteFunctor::DirectSum(Box::new(f), Box::new(g))
    }

    pub fn compose(f: ConcreteFunctor, g: ConcreteFunctor) -> Self {
        ConcreteFunctor::Compose(Box::new(f), Box::new(g))
    }

    /// Object map: dimension of `f(x)` for `dim x = d`.
    pub fn dim(&self, d: usize) -> usize {
        match self {
            ConcreteFunctor::Constant(c) => *c,
            ConcreteFunctor::Identity => d,
            ConcreteFunctor::TensorPower(n) => d.pow(*n as u32),
            ConcreteFunctor::SymPower(n) => binomial(d + n - 1, *n),
            ConcreteFunctor::DirectSum(f, g) => f.dim(d) + g.dim(d),
            ConcreteFunctor::Compose(f, g) => f.dim(g.dim(d)),
        }
    }

    /// Morphism map. `a` may be rectangular: columns are the source
    /// dimension, rows the target dimension.
    pub fn map(&self, a: &Mat) -> Mat {
        match self {
            ConcreteFunctor::Constant(c) => Mat::identity(*c),
            ConcreteFunctor::Identity => a.clone(),
            ConcreteFunctor::TensorPower(n) => {
                let mut out = Mat::identity(1);
                for _ in 0..*n {
                    out = out.kron(a);
                }
                out
            }
            ConcreteFunctor::SymPower(n) => {
                let tensor = ConcreteFunctor::TensorPower(*n).map(a);
                let (incl_src, proj_src) = sym_split(a.cols, *n);
                let (incl_dst, proj_dst) = sym_split(a.rows, *n);
                let _ = proj_src;
                let _ = incl_dst;
                &(&proj_dst * &tensor) * &incl_src
            }
            ConcreteFunctor::DirectSum(f, g) => f.map(a).direct_sum(&g.map(a)),
            ConcreteFunctor::Compose(f, g) => f.map(&g.map(a)),
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out as usize
}

/// Inclusion/projection of `Sym^n(ℚ^d)` inside the n-th tensor power, from
/// the symmetrization idempotent (sum over permutations divided by n!).
type SymSplitCache = RefCell<HashMap<(usize, usize), Rc<(Mat, Mat)>>>;

fn sym_split(d: usize, n: usize) -> (Mat, Mat) {
    thread_local! {
        static CACHE: SymSplitCache = RefCell::new(HashMap::new());
    }
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&(d, n)).cloned()) {
        return (hit.0.clone(), hit.1.clone());
    }
    let out = sym_split_uncached(d, n);
    CACHE.with(|c| {
        c.borrow_mut()
            .insert((d, n), Rc::new((out.0.clone(), out.1.clone())))
    });
    out
}

fn sym_split_uncached(d: usize, n: usize) -> (Mat, Mat) {
    let dim = d.pow(n as u32);
    let perms = permutations(n);
    let factor = BigRational::new(BigInt::from(1), BigInt::from(perms.len() as i64));
    let mut e = Mat::zeros(dim, dim);
    for perm in &perms {
        for col in 0..dim {
            let idx = unrank(col, d, n);
            let permuted: Vec<usize> = (0..n).map(|i| idx[perm[i]]).collect();
            let row = rank(&permuted, d);
            e[(row, col)] = &e[(row, col)] + &factor;
        }
    }
    e.idempotent_split()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn unrank(mut i: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for j in (0..n).rev() {
        out[j] = i % d;
        i /= d;
    }
    out
}

fn rank(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

/// A split summand of an ambient space: the exact idempotent together with
/// an inclusion/projection pair realizing its image.
#[derive(Debug, Clone)]
pub struct SplitSummand {
    pub ambient_dim: usize,
    pub idempotent: Mat,
    pub incl: Mat,
    pub proj: Mat,
}

impl SplitSummand {
    pub fn dim(&self) -> usize {
        self.incl.cols
    }

    pub fn validate(&self) -> Result<(), ConcreteError> {
        if &self.idempotent * &self.idempotent != self.idempotent {
            return Err(ConcreteError::NotIdempotent);
        }
        Ok(())
    }
}

/// Block endomorphism of `⊕ dims` that kills the `kill`-th block.
fn kill_block(dims: &[usize], kill: usize) -> Mat {
    let mut blocks: Vec<Mat> = Vec::new();
    for (i, &d) in dims.iter().enumerate() {
        blocks.push(if i == kill {
            Mat::zeros(d, d)
        } else {
            Mat::identity(d)
        });
    }
    let mut out = Mat::zeros(0, 0);
    for b in blocks {
        out = out.direct_sum(&b);
    }
    out
}

/// The inclusion-exclusion idempotent cutting `cr_n f(x_1, …, x_n)` out of
/// `f(x_1 ⊕ … ⊕ x_n)`.
pub fn cross_effect_idempotent(f: &ConcreteFunctor, dims: &[usize]) -> Mat {
    let ambient: usize = f.dim(dims.iter().sum());
    let mut e = Mat::identity(ambient);
    for i in 0..dims.len() {
        let rho = f.map(&kill_block(dims, i));
        let factor = &Mat::identity(ambient) - &rho;
        e = &e * &factor;
    }
    e
}

/// Exact rank of an idempotent: its trace (an integer for idempotents).
pub fn idempotent_rank(e: &Mat) -> usize {
    let mut tr = Rat::zero();
    for i in 0..e.rows {
        tr = &tr + &e[(i, i)];
    }
    assert!(tr.is_integer(), "idempotent trace must be an integer");
    let v = tr.to_integer();
    assert!(v >= BigInt::zero());
    let digits = v.to_u64_digits().1;
    if digits.is_empty() {
        0
    } else {
        digits[0] as usize
    }
}

/// Dimension of `cr_n f` at the given slot dimensions, by trace.
pub fn cross_effect_dim(f: &ConcreteFunctor, dims: &[usize]) -> usize {
    idempotent_rank(&cross_effect_idempotent(f, dims))
}

/// Full splitting (inclusion and projection) of a cross effect.
pub fn cross_effect_split(f: &ConcreteFunctor, dims: &[usize]) -> SplitSummand {
    thread_local! {
        static CACHE: RefCell<HashMap<String, Rc<SplitSummand>>> = RefCell::new(HashMap::new());
    }
    let mut key = String::new();
    f.write_key(&mut key);
    let _ = write!(key, "#{dims:?}");
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return (*hit).clone();
    }
    let e = cross_effect_idempotent(f, dims);
    let (incl, proj) = e.idempotent_split();
    let out = SplitSummand {
        ambient_dim: e.rows,
        idempotent: e,
        incl,
        proj,
    };
    CACHE.with(|c| c.borrow_mut().insert(key, Rc::new(out.clone())));
    out
}

/// An honest functor of several variables, with exact object and morphism
/// maps. Morphism arguments may be rectangular.
#[derive(Clone)]
pub enum MultiFunctor {
    /// A one-variable combinator functor, as arity 1.
    Plain(Rc<ConcreteFunctor>),
    /// `cr_n f` of a one-variable functor, as an n-variable functor.
    CrossOf { f: Rc<ConcreteFunctor>, n: usize },
    /// Projection onto one slot.
    Proj { arity: usize, slot: usize },
    /// Constant functor at a fixed dimension.
    ConstDim { arity: usize, dim: usize },
    /// Composition `outer(inner_1(x̄), …, inner_k(x̄))`.
    Tuple {
        outer: Rc<MultiFunctor>,
        inners: Vec<Rc<MultiFunctor>>,
    },
    /// Pointwise direct sum of functors of the same arity.
    SumOf { parts: Vec<Rc<MultiFunctor>> },
    /// Second cross effect in one slot, on the diagonal of that slot.
    SlotC2 { base: Rc<MultiFunctor>, slot: usize },
    /// Reduced part (first cross effect) in one slot.
    SlotCr1 { base: Rc<MultiFunctor>, slot: usize },
}

impl MultiFunctor {
    fn write_key(&self, out: &mut String) {
        match self {
            MultiFunctor::Plain(f) => {
                out.push('P');
                f.write_key(out);
            }
            MultiFunctor::CrossOf { f, n } => {
                let _ = write!(out, "X{n}");
                f.write_key(out);
            }
            MultiFunctor::Proj { arity, slot } => {
                let _ = write!(out, "V{arity}.{slot}");
            }
            MultiFunctor::ConstDim { arity, dim } => {
                let _ = write!(out, "K{arity}.{dim}");
            }
            MultiFunctor::Tuple { outer, inners } => {
                out.push('T');
                outer.write_key(out);
                out.push('[');
                for i in inners {
                    i.write_key(out);
                    out.push(',');
                }
                out.push(']');
            }
            MultiFunctor::SumOf { parts } => {
                out.push('S');
                out.push('[');
                for p in parts {
                    p.write_key(out);
                    out.push(',');
                }
                out.push(']');
            }
            MultiFunctor::SlotC2 { base, slot } => {
                let _ = write!(out, "C{slot}");
                base.write_key(out);
            }
            MultiFunctor::SlotCr1 { base, slot } => {
                let _ = write!(out, "R{slot}");
                base.write_key(out);
            }
        }
    }

    fn cache_key(&self, dims: &[usize]) -> String {
        let mut key = String::new();
        self.write_key(&mut key);
        let _ = write!(key, "@{dims:?}");
        key
    }

    pub fn arity(&self) -> usize {
        match self {
            MultiFunctor::Plain(_) => 1,
            MultiFunctor::CrossOf { n, .. } => *n,
            MultiFunctor::Proj { arity, .. } | MultiFunctor::ConstDim { arity, .. } => *arity,
            MultiFunctor::Tuple { inners, .. } => inners.first().map(|i| i.arity()).unwrap_or(0),
            MultiFunctor::SumOf { parts } => parts.first().map(|p| p.arity()).unwrap_or(0),
            MultiFunctor::SlotC2 { base, .. } | MultiFunctor::SlotCr1 { base, .. } => base.arity(),
        }
    }

    pub fn dim(&self, dims: &[usize]) -> usize {
        debug_assert_eq!(dims.len(), self.arity());
        thread_local! {
            static CACHE: RefCell<HashMap<String, usize>> = RefCell::new(HashMap::new());
        }
        let key = self.cache_key(dims);
        if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).copied()) {
            return hit;
        }
        let out = self.dim_uncached(dims);
        CACHE.with(|c| c.borrow_mut().insert(key, out));
        out
    }

    fn dim_uncached(&self, dims: &[usize]) -> usize {
        match self {
            MultiFunctor::Plain(f) => f.dim(dims[0]),
            MultiFunctor::CrossOf { f, n: _ } => cross_effect_dim(f, dims),
            MultiFunctor::Proj { slot, .. } => dims[*slot],
            MultiFunctor::ConstDim { dim, .. } => *dim,
            MultiFunctor::Tuple { outer, inners } => {
                let inner_dims: Vec<usize> = inners.iter().map(|i| i.dim(dims)).collect();
                outer.dim(&inner_dims)
            }
            MultiFunctor::SumOf { parts } => parts.iter().map(|p| p.dim(dims)).sum(),
            MultiFunctor::SlotC2 { base, slot } => {
                idempotent_rank(&slot_idempotent(base, dims, *slot, 2))
            }
            MultiFunctor::SlotCr1 { base, slot } => {
                idempotent_rank(&slot_idempotent(base, dims, *slot, 1))
            }
        }
    }

    /// Morphism map; `mats[i]` sends the i-th source slot to the i-th
    /// target slot.
    pub fn map(&self, mats: &[Mat]) -> Mat {
        debug_assert_eq!(mats.len(), self.arity());
        match self {
            MultiFunctor::Plain(f) => f.map(&mats[0]),
            MultiFunctor::CrossOf { f, .. } => {
                let src: Vec<usize> = mats.iter().map(|m| m.cols).collect();
                let dst: Vec<usize> = mats.iter().map(|m| m.rows).collect();
                let split_src = cross_effect_split(f, &src);
                let split_dst = cross_effect_split(f, &dst);
                let mut big = Mat::zeros(0, 0);
                for m in mats {
                    big = big.direct_sum(m);
                }
                &(&split_dst.proj * &f.map(&big)) * &split_src.incl
            }
            MultiFunctor::Proj { slot, .. } => mats[*slot].clone(),
            MultiFunctor::ConstDim { dim, .. } => Mat::identity(*dim),
            MultiFunctor::Tuple { outer, inners } => {
                let inner_mats: Vec<Mat> = inners.iter().map(|i| i.map(mats)).collect();
                outer.map(&inner_mats)
            }
            MultiFunctor::SumOf { parts } => {
                let mut out = Mat::zeros(0, 0);
                for p in parts {
                    out = out.direct_sum(&p.map(mats));
                }
                out
            }
            MultiFunctor::SlotC2 { base, slot } => slot_map(base, mats, *slot, 2),
            MultiFunctor::SlotCr1 { base, slot } => slot_map(base, mats, *slot, 1),
        }
    }
}

/// Idempotent for the slot-wise reduced part (`k = 1`) or slot-wise second
/// cross effect on the slot diagonal (`k = 2`).
pub fn slot_idempotent(base: &MultiFunctor, dims: &[usize], slot: usize, k: usize) -> Mat {
    let d = dims[slot];
    let mut ambient_dims = dims.to_vec();
    ambient_dims[slot] = k * d;
    let ambient = base.dim(&ambient_dims);
    let mut e = Mat::identity(ambient);
    for kill in 0..k {
        // Kill one copy of the slot diagonal.
        let mut rho = Mat::zeros(k * d, k * d);
        for copy in 0..k {
            if copy == kill {
                continue;
            }
            for i in 0..d {
                rho[(copy * d + i, copy * d + i)] = Rat::one();
            }
        }
        let mats: Vec<Mat> = (0..dims.len())
            .map(|j| {
                if j == slot {
                    rho.clone()
                } else {
                    Mat::identity(dims[j])
                }
            })
            .collect();
        let img = base.map(&mats);
        e = &e * &(&Mat::identity(ambient) - &img);
    }
    e
}

pub fn slot_split(base: &MultiFunctor, dims: &[usize], slot: usize, k: usize) -> SplitSummand {
    thread_local! {
        static CACHE: RefCell<HashMap<String, Rc<SplitSummand>>> = RefCell::new(HashMap::new());
    }
    let mut key = base.cache_key(dims);
    let _ = write!(key, "!{slot}.{k}");
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return (*hit).clone();
    }
    let e = slot_idempotent(base, dims, slot, k);
    let (incl, proj) = e.idempotent_split();
    let out = SplitSummand {
        ambient_dim: e.rows,
        idempotent: e,
        incl,
        proj,
    };
    CACHE.with(|c| c.borrow_mut().insert(key, Rc::new(out.clone())));
    out
}

fn slot_map(base: &MultiFunctor, mats: &[Mat], slot: usize, k: usize) -> Mat {
    let src: Vec<usize> = mats.iter().map(|m| m.cols).collect();
    let dst: Vec<usize> = mats.iter().map(|m| m.rows).collect();
    let split_src = slot_split(base, &src, slot, k);
    let split_dst = slot_split(base, &dst, slot, k);
    let doubled: Vec<Mat> = (0..mats.len())
        .map(|j| {
            if j == slot {
                let mut big = Mat::zeros(0, 0);
                for _ in 0..k {
                    big = big.direct_sum(&mats[j]);
                }
                big
            } else {
                mats[j].clone()
            }
        })
        .collect();
    &(&split_dst.proj * &base.map(&doubled)) * &split_src.incl
}

/// Parses a functor spec: `id`, `constN`, `tensorN`, `symN`, sums with `+`
/// and composition with `.` (left-associative), parentheses allowed.
pub fn parse_functor(spec: &str) -> Result<ConcreteFunctor, ConcreteError> {
    let toks = lex_spec(spec)?;
    let mut pos = 0;
    let f = parse_sum(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(ConcreteError::UnknownSpec(spec.to_string()));
    }
    Ok(f)
}

#[derive(PartialEq, Clone, Debug)]
enum SpecTok {
    Name(String),
    Plus,
    Dot,
    LParen,
    RParen,
}

fn lex_spec(s: &str) -> Result<Vec<SpecTok>, ConcreteError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(SpecTok::Plus);
                i += 1;
            }
            '.' => {
                out.push(SpecTok::Dot);
                i += 1;
            }
            '(' => {
                out.push(SpecTok::LParen);
                i += 1;
            }
            ')' => {
                out.push(SpecTok::RParen);
                i += 1;
            }
            c if c.is_ascii_alphanumeric() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(SpecTok::Name(chars[start..i].iter().collect()));
            }
            other => return Err(ConcreteError::UnknownSpec(format!("char `{other}`"))),
        }
    }
    Ok(out)
}

fn parse_sum(toks: &[SpecTok], pos: &mut usize) -> Result<ConcreteFunctor, ConcreteError> {
    let mut f = parse_comp(toks, pos)?;
    while toks.get(*pos) == Some(&SpecTok::Plus) {
        *pos += 1;
        let g = parse_comp(toks, pos)?;
        f = ConcreteFunctor::sum(f, g);
    }
    Ok(f)
}

fn parse_comp(toks: &[SpecTok], pos: &mut usize) -> Result<ConcreteFunctor, ConcreteError> {
    let mut f = parse_leaf(toks, pos)?;
    while toks.get(*pos) == Some(&SpecTok::Dot) {
        *pos += 1;
        let g = parse_leaf(toks, pos)?;
        f = ConcreteFunctor::compose(f, g);
    }
    Ok(f)
}

fn parse_leaf(toks: &[SpecTok], pos: &mut usize) -> Result<ConcreteFunctor, ConcreteError> {
    match toks.get(*pos) {
        Some(SpecTok::LParen) => {
            *pos += 1;
            let f = parse_sum(toks, pos)?;
            if toks.get(*pos) != Some(&SpecTok::RParen) {
                return Err(ConcreteError::UnknownSpec("missing `)`".to_string()));
            }
            *pos += 1;
            Ok(f)
        }
        Some(SpecTok::Name(name)) => {
            *pos += 1;
            if name == "id" {
                return Ok(ConcreteFunctor::Identity);
            }
            for (prefix, ctor) in [("const", 0usize), ("tensor", 1), ("sym", 2)] {
                if let Some(digits) = name.strip_prefix(prefix) {
                    if let Ok(n) = digits.parse::<usize>() {
                        return Ok(match ctor {
                            0 => ConcreteFunctor::Constant(n),
                            1 => ConcreteFunctor::TensorPower(n),
                            _ => ConcreteFunctor::SymPower(n),
                        });
                    }
                }
            }
            Err(ConcreteError::UnknownSpec(name.clone()))
        }
        other => Err(ConcreteError::UnknownSpec(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::matrix::rat;

    fn random_small(rows: usize, cols: usize, seed: &mut u64) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                *seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                m[(r, c)] = rat(((*seed >> 33) % 5) as i64 - 2);
            }
        }
        m
    }

    #[test]
    fn tensor_power_dims() {
        assert_eq!(ConcreteFunctor::TensorPower(2).dim(3), 9);
        assert_eq!(ConcreteFunctor::SymPower(2).dim(3), 6);
        assert_eq!(ConcreteFunctor::Constant(4).dim(7), 4);
    }

    #[test]
    fn functoriality_on_samples() {
        let mut seed = 7;
        for f in [
            ConcreteFunctor::TensorPower(2),
            ConcreteFunctor::SymPower(2),
            ConcreteFunctor::sum(ConcreteFunctor::Identity, ConcreteFunctor::TensorPower(2)),
            ConcreteFunctor::compose(ConcreteFunctor::TensorPower(2), ConcreteFunctor::Identity),
        ] {
            // map(id) = id
            assert_eq!(f.map(&Mat::identity(2)), Mat::identity(f.dim(2)));
            // map(A·B) = map(A)·map(B) on random exact samples
            let a = random_small(2, 2, &mut seed);
            let b = random_small(2, 2, &mut seed);
            assert_eq!(f.map(&(&a * &b)), &f.map(&a) * &f.map(&b));
        }
    }

    #[test]
    fn cross_effect_of_tensor_square_is_mixed_terms() {
        // Oracle: expanding (x ⊕ y)⊗(x ⊕ y) gives blocks xx, xy, yx, yy;
        // the cross effect keeps the 2mn mixed ones.
        let f = ConcreteFunctor::TensorPower(2);
        for (m, n) in [(1usize, 1usize), (2, 1), (2, 3)] {
            assert_eq!(cross_effect_dim(&f, &[m, n]), 2 * m * n);
        }
    }

    #[test]
    fn cross_effect_of_identity_vanishes() {
        assert_eq!(cross_effect_dim(&ConcreteFunctor::Identity, &[2, 2]), 0);
    }

    #[test]
    fn first_cross_effect_is_reduced_part() {
        let f = ConcreteFunctor::sum(
            ConcreteFunctor::Constant(3),
            ConcreteFunctor::TensorPower(2),
        );
        for d in 0..4 {
            assert_eq!(cross_effect_dim(&f, &[d]), f.dim(d) - f.dim(0));
        }
    }

    #[test]
    fn idempotents_are_exact() {
        let f = ConcreteFunctor::sum(ConcreteFunctor::Identity, ConcreteFunctor::TensorPower(2));
        let split = cross_effect_split(&f, &[2, 1]);
        split.validate().unwrap();
        assert_eq!(&split.proj * &split.incl, Mat::identity(split.dim()));
        assert_eq!(&split.incl * &split.proj, split.idempotent);
    }

    #[test]
    fn parses_specs() {
        let f = parse_functor("tensor2 + id").unwrap();
        assert_eq!(f.dim(2), 6);
        let g = parse_functor("sym2 . (id + const1)").unwrap();
        assert_eq!(g.dim(1), 3);
    }
}
