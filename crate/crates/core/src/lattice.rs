//! Refinement order on preorders of `Q^n`: truncations, meets, composition
//! along the residue group, and quotients.
//!
//! The coarsenings of a preorder are exactly its truncations, so every order
//! question here reduces to comparing canonical prefixes.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{invert, mat_mul, transpose, FieldVector, RationalSubspace};
use crate::preorder::Preorder;
use crate::rational::Q;

/// The preorder defined by the first `k` canonical rows.
pub fn truncate(p: &Preorder, k: usize) -> Result<Preorder> {
    if k > p.rank() {
        return Err(Error::Range {
            index: k,
            max: p.rank(),
        });
    }
    if k == p.rank() {
        return Ok(p.clone());
    }
    Ok(Preorder::assemble(
        p.field(),
        p.n(),
        p.rows()[..k].to_vec(),
        p.flag()[..=k].to_vec(),
    ))
}

/// All coarsenings of `p`, from the trivial preorder up to `p` itself.
pub fn coarsenings(p: &Preorder) -> Vec<Preorder> {
    (0..=p.rank())
        .map(|k| truncate(p, k).expect("k <= rank"))
        .collect()
}

/// `true` when `fine` refines `coarse`, i.e. `coarse` is a truncation of `fine`.
pub fn refines(coarse: &Preorder, fine: &Preorder) -> Result<bool> {
    coarse.same_space(fine)?;
    Ok(coarse.rank() <= fine.rank() && coarse.rows() == &fine.rows()[..coarse.rank()])
}

/// Greatest common coarsening.
pub fn meet(p: &Preorder, q: &Preorder) -> Result<Preorder> {
    p.same_space(q)?;
    let top = p.rank().min(q.rank());
    let k = (0..=top)
        .rev()
        .find(|&k| p.rows()[..k] == q.rows()[..k])
        .expect("k = 0 always matches");
    truncate(p, k)
}

/// Functionals on `Q^n` supported on `span(basis)` that act on `basis[i]`
/// the way `row` acts on the `i`-th coordinate vector.
fn lift_rows(rows: &[FieldVector], basis: &[Vec<Q>]) -> Vec<FieldVector> {
    // dual basis D = B (B^T B)^-1 as columns; lifted row = D r
    let b_cols = transpose(basis);
    let gram = mat_mul(basis, &b_cols);
    let gram_inv = invert(&gram).expect("basis is independent");
    let dual = mat_mul(&b_cols, &gram_inv);
    rows.iter().map(|r| r.apply_rational(&dual)).collect()
}

fn check_basis(p: &Preorder, basis: &[Vec<Q>]) -> Result<()> {
    let residue = p.residue_group();
    if basis.iter().any(|b| b.len() != p.n()) {
        return Err(Error::Basis("vector length differs from n".into()));
    }
    if basis.len() != residue.dim() {
        return Err(Error::Basis(format!(
            "{} vectors for a residue group of dimension {}",
            basis.len(),
            residue.dim()
        )));
    }
    if RationalSubspace::span(p.n(), basis) != *residue {
        return Err(Error::Basis("vectors do not span the residue group".into()));
    }
    Ok(())
}

/// Lexicographic composition of `p` with a preorder `r` on its residue group,
/// where `r` is written in coordinates relative to `basis`.
pub fn compose(p: &Preorder, r: &Preorder, basis: &[Vec<Q>]) -> Result<Preorder> {
    check_basis(p, basis)?;
    if r.n() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: r.n(),
        });
    }
    if r.field() != p.field() {
        return Err(Error::FieldMismatch);
    }
    let mut rows = p.rows().to_vec();
    if !basis.is_empty() {
        rows.extend(lift_rows(r.rows(), basis));
    }
    Preorder::from_rows(p.field(), &rows, p.n())
}

/// Restriction of `p` to a subspace, in coordinates of the given basis.
pub fn restrict(p: &Preorder, basis: &[Vec<Q>]) -> Result<Preorder> {
    let m = basis.len();
    // row . (sum c_i b_i) = sum c_i (row . b_i)
    let rows: Vec<FieldVector> = p
        .rows()
        .iter()
        .map(|r| {
            let entries = basis
                .iter()
                .map(|b| crate::linalg::dot(b, r))
                .collect::<Result<Vec<_>>>()?;
            FieldVector::new(p.field(), entries)
        })
        .collect::<Result<_>>()?;
    Preorder::from_rows(p.field(), &rows, m)
}

/// Splits `p` as the composition of its `k`-th truncation with the
/// restriction of `p` to `W_k`, expressed in the echelon basis of `W_k`.
pub fn decompose(p: &Preorder, k: usize) -> Result<(Preorder, Preorder, Vec<Vec<Q>>)> {
    let head = truncate(p, k)?;
    let basis = p.flag()[k].basis().to_vec();
    let tail = restrict(p, &basis)?;
    Ok((head, tail, basis))
}

/// The preorder induced on `Q^n / H`, in the coordinates of the non-pivot
/// columns of `H`'s echelon basis.
pub fn quotient(p: &Preorder, h: &RationalSubspace) -> Result<Preorder> {
    if h.ambient_dim() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: h.ambient_dim(),
        });
    }
    if !h.is_subspace_of(p.residue_group()) {
        return Err(Error::NotContained);
    }
    let complement = complement_coordinates(h);
    let basis: Vec<Vec<Q>> = complement
        .iter()
        .map(|&j| {
            let mut e = vec![Q::zero(); p.n()];
            e[j] = Q::one();
            e
        })
        .collect();
    restrict(p, &basis)
}

/// Coordinate positions spanning a complement of `h`.
pub fn complement_coordinates(h: &RationalSubspace) -> Vec<usize> {
    (0..h.ambient_dim())
        .filter(|j| !h.pivots().contains(j))
        .collect()
}
