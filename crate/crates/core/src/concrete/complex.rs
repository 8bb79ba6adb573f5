//! Truncated linearization complexes and their homology.
//!
//! The linearization of a functor is the chain complex with the reduced part
//! in degree zero and the k-fold diagonal second cross effect in degree k,
//! with differentials alternating over the positions at which the comonad
//! counit is applied: `∂_k = Σ_{i=0}^{k-1} (−1)^i C₂^{×i} ε`. The counit is
//! realized by including the diagonal cross effect into the value at the
//! doubled object and applying the fold map; `∂ ∘ ∂ = 0` is validated
//! exactly on every constructed complex.

use super::functor::{slot_split, ConcreteError, ConcreteFunctor, MultiFunctor};
use super::matrix::Mat;
use std::rc::Rc;

/// A bounded chain complex of exact matrices, degrees `0..=top`.
#[derive(Debug, Clone)]
pub struct ComplexRep {
    /// Dimension of the space in each degree.
    pub dims: Vec<usize>,
    /// `diffs[k-1]` is `∂_k : degree k → degree k-1`.
    pub diffs: Vec<Mat>,
}

impl ComplexRep {
    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn zero(top: usize) -> ComplexRep {
        ComplexRep {
            dims: vec![0; top + 1],
            diffs: (0..top).map(|_| Mat::zeros(0, 0)).collect(),
        }
    }

    /// Concentrated in degree zero.
    pub fn concentrated(dim: usize, top: usize) -> ComplexRep {
        let mut c = ComplexRep::zero(top);
        c.dims[0] = dim;
        if top >= 1 {
            c.diffs[0] = Mat::zeros(dim, 0);
        }
        c
    }

    pub fn direct_sum(&self, other: &ComplexRep) -> ComplexRep {
        assert_eq!(self.dims.len(), other.dims.len());
        ComplexRep {
            dims: self
                .dims
                .iter()
                .zip(&other.dims)
                .map(|(a, b)| a + b)
                .collect(),
            diffs: self
                .diffs
                .iter()
                .zip(&other.diffs)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        }
    }

    /// Checks shapes and `∂ ∘ ∂ = 0` exactly.
    pub fn validate(&self) -> Result<(), ConcreteError> {
        for (k, d) in self.diffs.iter().enumerate() {
            if d.rows != self.dims[k] || d.cols != self.dims[k + 1] {
                return Err(ConcreteError::DimensionMismatch {
                    expected: self.dims[k],
                    got: d.rows,
                });
            }
        }
        for k in 0..self.diffs.len().saturating_sub(1) {
            let composite = &self.diffs[k] * &self.diffs[k + 1];
            if !composite.is_zero() {
                return Err(ConcreteError::NotIdempotent);
            }
        }
        Ok(())
    }

    /// Homology dimensions in degrees `0 .. top` (the truncation degree
    /// itself is excluded: its kernel is not trustworthy).
    pub fn homology_dims(&self) -> Vec<usize> {
        let top = self.top_degree();
        let mut out = Vec::new();
        for k in 0..top {
            let rank_in = if k == 0 { 0 } else { self.diffs[k - 1].rank() };
            let rank_out = self.diffs[k].rank();
            out.push(self.dims[k] - rank_in - rank_out);
        }
        out
    }
}

/// `C₂^j` applied in `slot` (`j = 0` is the functor itself).
fn c2_pow(base: &Rc<MultiFunctor>, slot: usize, j: usize) -> Rc<MultiFunctor> {
    let mut f = base.clone();
    for _ in 0..j {
        f = Rc::new(MultiFunctor::SlotC2 { base: f, slot });
    }
    f
}

/// Degree-k space of the slot-wise linearization tower.
fn tower(base: &Rc<MultiFunctor>, slot: usize, k: usize) -> Rc<MultiFunctor> {
    if k == 0 {
        Rc::new(MultiFunctor::SlotCr1 {
            base: base.clone(),
            slot,
        })
    } else {
        c2_pow(base, slot, k)
    }
}

fn doubled(dims: &[usize], slot: usize) -> Vec<usize> {
    let mut d = dims.to_vec();
    d[slot] *= 2;
    d
}

/// The counit `ε : C₂ h → h` in `slot` at the given dimensions: include the
/// diagonal cross effect into the value at the doubled slot, then apply the
/// fold map.
fn eps_mat(h: &Rc<MultiFunctor>, slot: usize, dims: &[usize]) -> Mat {
    let split = slot_split(h, dims, slot, 2);
    let d = dims[slot];
    let fold = Mat::identity(d).hcat(&Mat::identity(d));
    let mats: Vec<Mat> = (0..dims.len())
        .map(|j| {
            if j == slot {
                fold.clone()
            } else {
                Mat::identity(dims[j])
            }
        })
        .collect();
    &h.map(&mats) * &split.incl
}

/// Conjugates a natural map `src → dst` through one layer of `C₂` in `slot`.
fn c2_wrap(
    src: &Rc<MultiFunctor>,
    dst: &Rc<MultiFunctor>,
    slot: usize,
    dims: &[usize],
    inner: &Mat,
) -> Mat {
    let s = slot_split(src, dims, slot, 2);
    let d = slot_split(dst, dims, slot, 2);
    &(&d.proj * inner) * &s.incl
}

/// Conjugates a natural map through the reduced-part splitting in `slot`.
fn cr1_wrap(
    src: &Rc<MultiFunctor>,
    dst: &Rc<MultiFunctor>,
    slot: usize,
    dims: &[usize],
    inner: &Mat,
) -> Mat {
    let s = slot_split(src, dims, slot, 1);
    let d = slot_split(dst, dims, slot, 1);
    &(&d.proj * inner) * &s.incl
}

/// Face `i` of `∂_k : C₂^k → C₂^{k-1}` in `slot`: `C₂^{×i} ε`.
fn face(base: &Rc<MultiFunctor>, slot: usize, k: usize, i: usize, dims: &[usize]) -> Mat {
    if i == 0 {
        eps_mat(&c2_pow(base, slot, k - 1), slot, dims)
    } else {
        let inner = face(base, slot, k - 1, i - 1, &doubled(dims, slot));
        c2_wrap(
            &c2_pow(base, slot, k - 1),
            &c2_pow(base, slot, k - 2),
            slot,
            dims,
            &inner,
        )
    }
}

/// `∂_k` of the slot-wise linearization tower at fixed dimensions.
fn tower_diff(base: &Rc<MultiFunctor>, slot: usize, k: usize, dims: &[usize]) -> Mat {
    assert!(k >= 1);
    if k == 1 {
        let split = slot_split(base, dims, slot, 1);
        &split.proj * &eps_mat(base, slot, dims)
    } else {
        let mut sum = face(base, slot, k, 0, dims);
        for i in 1..k {
            let f = face(base, slot, k, i, dims);
            sum = if i % 2 == 1 { &sum - &f } else { &sum + &f };
        }
        sum
    }
}

/// Linearization complex of a multi-variable functor in one slot, the other
/// slots held at fixed dimensions. Truncated at degree `top`.
pub fn linearization_complex_mf(
    base: &Rc<MultiFunctor>,
    slot: usize,
    dims: &[usize],
    top: usize,
) -> Result<ComplexRep, ConcreteError> {
    let dims_by_degree: Vec<usize> = (0..=top).map(|k| tower(base, slot, k).dim(dims)).collect();
    let diffs: Vec<Mat> = (1..=top).map(|k| tower_diff(base, slot, k, dims)).collect();
    let c = ComplexRep {
        dims: dims_by_degree,
        diffs,
    };
    c.validate()?;
    Ok(c)
}

/// Linearization complex of a one-variable combinator functor.
pub fn linearization_complex(
    f: &ConcreteFunctor,
    x_dim: usize,
    top: usize,
) -> Result<ComplexRep, ConcreteError> {
    let base = Rc::new(MultiFunctor::Plain(Rc::new(f.clone())));
    linearization_complex_mf(&base, 0, &[x_dim], top)
}

/// Wraps a slot-1 natural map through level `p` of the slot-0 tower.
fn wrap_tower0(
    src_base: &Rc<MultiFunctor>,
    dst_base: &Rc<MultiFunctor>,
    p: usize,
    dims: &[usize],
    nat: &dyn Fn(&[usize]) -> Mat,
) -> Mat {
    fn wrap_c2pow(
        src: &Rc<MultiFunctor>,
        dst: &Rc<MultiFunctor>,
        j: usize,
        dims: &[usize],
        nat: &dyn Fn(&[usize]) -> Mat,
    ) -> Mat {
        if j == 0 {
            nat(dims)
        } else {
            let inner = wrap_c2pow(src, dst, j - 1, &doubled(dims, 0), nat);
            c2_wrap(
                &c2_pow(src, 0, j - 1),
                &c2_pow(dst, 0, j - 1),
                0,
                dims,
                &inner,
            )
        }
    }
    if p == 0 {
        cr1_wrap(src_base, dst_base, 0, dims, &nat(dims))
    } else {
        wrap_c2pow(src_base, dst_base, p, dims, nat)
    }
}

/// Sequential two-slot linearization: the totalization of the bicomplex of
/// slot-wise towers, truncated at total degree `top`.
pub fn bicomplex_total(
    base: &Rc<MultiFunctor>,
    dims: &[usize],
    top: usize,
) -> Result<ComplexRep, ConcreteError> {
    assert_eq!(base.arity(), 2, "sequential linearization needs two slots");
    // Cells (p, q) with p + q ≤ top: K_{p,q} = T₀^p T₁^q base.
    let cell = |p: usize, q: usize| -> Rc<MultiFunctor> {
        let fq = tower(base, 1, q);
        tower(&fq, 0, p)
    };
    let cells_of = |n: usize| -> Vec<(usize, usize)> { (0..=n).map(|p| (p, n - p)).collect() };
    let cell_dim: Vec<Vec<usize>> = (0..=top)
        .map(|n| {
            cells_of(n)
                .iter()
                .map(|&(p, q)| cell(p, q).dim(dims))
                .collect()
        })
        .collect();
    let total_dims: Vec<usize> = cell_dim.iter().map(|v| v.iter().sum()).collect();

    let mut diffs = Vec::new();
    for n in 1..=top {
        let src_cells = cells_of(n);
        let dst_cells = cells_of(n - 1);
        let dst_offsets: Vec<usize> = dst_cells
            .iter()
            .scan(0, |acc, &(p, q)| {
                let off = *acc;
                *acc += cell(p, q).dim(dims);
                Some(off)
            })
            .collect();
        let mut d = Mat::zeros(total_dims[n - 1], total_dims[n]);
        let mut src_off = 0;
        for &(p, q) in &src_cells {
            let w = cell(p, q).dim(dims);
            // Horizontal: (p, q) → (p-1, q), the slot-0 tower differential of
            // T₁^q base.
            if p >= 1 {
                let fq = tower(base, 1, q);
                let block = tower_diff(&fq, 0, p, dims);
                let dst_idx = dst_cells.iter().position(|&c| c == (p - 1, q)).unwrap();
                copy_block(&mut d, &block, dst_offsets[dst_idx], src_off);
            }
            // Vertical: (p, q) → (p, q-1), the slot-1 differential wrapped
            // through the slot-0 tower, with the sign twist (−1)^p.
            if q >= 1 {
                let src_base = tower(base, 1, q);
                let dst_base = tower(base, 1, q - 1);
                let nat = |dd: &[usize]| tower_diff(base, 1, q, dd);
                let mut block = wrap_tower0(&src_base, &dst_base, p, dims, &nat);
                if p % 2 == 1 {
                    block = &Mat::zeros(block.rows, block.cols) - &block;
                }
                let dst_idx = dst_cells.iter().position(|&c| c == (p, q - 1)).unwrap();
                copy_block(&mut d, &block, dst_offsets[dst_idx], src_off);
            }
            src_off += w;
        }
        diffs.push(d);
    }
    let c = ComplexRep {
        dims: total_dims,
        diffs,
    };
    c.validate()?;
    Ok(c)
}

fn copy_block(dst: &mut Mat, block: &Mat, row_off: usize, col_off: usize) {
    for r in 0..block.rows {
        for c in 0..block.cols {
            dst[(row_off + r, col_off + c)] = block[(r, c)].clone();
        }
    }
}

/// How a multi-variable functor is linearized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearizationMode {
    /// Slot by slot: the totalization of the bicomplex of slot-wise towers.
    Sequential,
    /// All occurrences at once: substitute the diagonal, then linearize.
    Simultaneous,
}

/// Linearization complex of a two-slot functor in both slots. The two modes
/// produce genuinely different complexes.
pub fn multilinearization_complex(
    base: &Rc<MultiFunctor>,
    dims: &[usize],
    top: usize,
    mode: LinearizationMode,
) -> Result<ComplexRep, ConcreteError> {
    match mode {
        LinearizationMode::Sequential => bicomplex_total(base, dims, top),
        LinearizationMode::Simultaneous => {
            assert!(
                dims.windows(2).all(|w| w[0] == w[1]),
                "simultaneous linearization substitutes the diagonal"
            );
            simultaneous_complex(base, dims[0], top)
        }
    }
}

/// Simultaneous linearization of a two-slot functor: substitute the diagonal
/// first, then take the one-variable linearization.
pub fn simultaneous_complex(
    base: &Rc<MultiFunctor>,
    dim: usize,
    top: usize,
) -> Result<ComplexRep, ConcreteError> {
    let arity = base.arity();
    let diag = Rc::new(MultiFunctor::Tuple {
        outer: base.clone(),
        inners: (0..arity)
            .map(|_| Rc::new(MultiFunctor::Proj { arity: 1, slot: 0 }))
            .collect(),
    });
    linearization_complex_mf(&diag, 0, &[dim], top)
}
