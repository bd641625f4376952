//! Exact linear algebra over `Q` and over a number field viewed as `Q`-layers.
//!
//! Subspaces of `Q^n` are kept in reduced row-echelon form so that equal
//! subspaces compare equal structurally.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, primitive_integer, Q};
use crate::realfield::{FieldElement, NumberField};

/// Gauss-Jordan elimination over `Z` with content reduction.
///
/// Returns the nonzero reduced rows (each primitive, pivot positive) and their
/// pivot columns. Every pivot column is zero in all other rows.
fn integer_rref(rows: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut rows: Vec<Vec<BigInt>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(sel) = (rank..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| rows[i][col].abs())
        else {
            continue;
        };
        rows.swap(rank, sel);
        if rows[rank][col].is_negative() {
            for x in rows[rank].iter_mut() {
                *x = -x.clone();
            }
        }
        let pivot_row = rows[rank].clone();
        let p = pivot_row[col].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let g = p.gcd(&row[col]);
            let a = &p / &g;
            let b = &row[col] / &g;
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &a * &*x - &b * y;
            }
            make_primitive(row);
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

fn to_integer_rows(rows: &[Vec<Q>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| primitive_integer(r)).collect()
}

/// Reduced row-echelon form over `Q` with unit pivots.
pub fn rref(rows: &[Vec<Q>], ncols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let (int_rows, pivots) = integer_rref(to_integer_rows(rows), ncols);
    let rows = int_rows
        .into_iter()
        .zip(&pivots)
        .map(|(r, &p)| {
            let lead = Q::from_integer(r[p].clone());
            r.into_iter().map(|x| Q::from_integer(x) / &lead).collect()
        })
        .collect();
    (rows, pivots)
}

/// `{x in Q^ncols : row . x = 0 for every row}`.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> RationalSubspace {
    let (int_rows, pivots) = integer_rref(to_integer_rows(rows), ncols);
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (row, &p) in int_rows.iter().zip(&pivots) {
            if !row[free].is_zero() {
                v[p] = -Q::new(row[free].clone(), row[p].clone());
            }
        }
        basis.push(v);
    }
    RationalSubspace::span(ncols, &basis)
}

/// Solves `m x = rhs` for square invertible `m`.
pub fn solve_square(m: Vec<Vec<Q>>, rhs: Vec<Q>) -> Option<Vec<Q>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .into_iter()
        .zip(rhs)
        .map(|(mut row, b)| {
            row.push(b);
            row
        })
        .collect();
    for col in 0..n {
        let sel = (col..n).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(col, sel);
        let p = aug[col][col].clone();
        for x in aug[col].iter_mut() {
            *x /= &p;
        }
        let pivot_row = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Inverse of a square rational matrix.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Q::zero(); n];
        e[j] = Q::one();
        cols.push(solve_square(m.to_vec(), e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::one();
    for col in 0..n {
        let Some(sel) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Q::zero();
        };
        if sel != col {
            a.swap(col, sel);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            if !row[col].is_zero() {
                let f = &row[col] / &p;
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    det
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Q::zero(), |acc, k| {
                        if row[k].is_zero() {
                            acc
                        } else {
                            acc + &row[k] * &b[k][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_vec(a: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    a.iter().map(|row| crate::rational::dot(row, v)).collect()
}

/// A subspace of `Q^n` in canonical reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalSubspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for RationalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| {
                let xs: Vec<String> = r.iter().map(fmt_q).collect();
                format!("({})", xs.join(","))
            })
            .collect();
        write!(f, "span{{{}}} in Q^{}", rows.join(","), self.ambient)
    }
}

impl RationalSubspace {
    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![Q::zero(); n];
                v[i] = Q::one();
                v
            })
            .collect();
        RationalSubspace {
            ambient: n,
            basis,
            pivots: (0..n).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        RationalSubspace {
            ambient: n,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(n: usize, vectors: &[Vec<Q>]) -> Self {
        let (basis, pivots) = rref(vectors, n);
        RationalSubspace {
            ambient: n,
            basis,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Reduced row-echelon basis; the `k`-th vector has a 1 at `pivots()[k]`.
    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.ambient {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: n,
            })
        }
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        let coords: Vec<Q> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut recon = vec![Q::zero(); self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (r, x) in recon.iter_mut().zip(b) {
                *r += c * x;
            }
        }
        (recon.as_slice() == v).then_some(coords)
    }

    pub fn contains(&self, v: &[Q]) -> Result<bool> {
        self.check_dim(v.len())?;
        Ok(self.coordinates(v).is_some())
    }

    pub fn contains_int(&self, v: &[i64]) -> bool {
        let v: Vec<Q> = v.iter().map(|&x| Q::from_integer(x.into())).collect();
        self.coordinates(&v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.coordinates(b).is_some())
    }

    /// Orthogonal complement with respect to the standard inner product.
    pub fn orthogonal_complement(&self) -> Self {
        nullspace(&self.basis, self.ambient)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.ambient)?;
        let mut constraints = self.orthogonal_complement().basis;
        constraints.extend(other.orthogonal_complement().basis);
        Ok(nullspace(&constraints, self.ambient))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.ambient)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Ok(Self::span(self.ambient, &all))
    }

    /// Orthogonal projection matrix `B^T (B B^T)^-1 B` onto the subspace.
    pub fn projection_matrix(&self) -> Vec<Vec<Q>> {
        let n = self.ambient;
        if self.is_full() {
            return RationalSubspace::full(n).basis;
        }
        if self.dim() == 0 {
            return vec![vec![Q::zero(); n]; n];
        }
        let b = &self.basis;
        let gram = mat_mul(b, &transpose(b));
        let gram_inv = invert(&gram).expect("Gram matrix of a basis is invertible");
        mat_mul(&transpose(b), &mat_mul(&gram_inv, b))
    }

    /// Orthogonal projection of a field vector onto `R (x) W`, layer by layer.
    pub fn project(&self, v: &FieldVector) -> Result<FieldVector> {
        self.check_dim(v.len())?;
        if self.is_full() {
            return Ok(v.clone());
        }
        Ok(v.apply_rational(&self.projection_matrix()))
    }
}

/// A vector of number-field elements sharing one field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldVector {
    field: NumberField,
    entries: Vec<FieldElement>,
}

impl fmt::Debug for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

impl FieldVector {
    pub fn new(field: &NumberField, entries: Vec<FieldElement>) -> Result<Self> {
        if entries.iter().any(|e| e.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(FieldVector {
            field: field.clone(),
            entries,
        })
    }

    pub fn zeros(field: &NumberField, n: usize) -> Self {
        FieldVector {
            field: field.clone(),
            entries: vec![field.zero(); n],
        }
    }

    pub fn from_rationals(field: &NumberField, v: &[Q]) -> Self {
        FieldVector {
            field: field.clone(),
            entries: v.iter().map(|x| field.from_rational(x.clone())).collect(),
        }
    }

    pub fn from_ints(field: &NumberField, v: &[i64]) -> Self {
        let v: Vec<Q> = v.iter().map(|&x| Q::from_integer(x.into())).collect();
        Self::from_rationals(field, &v)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    /// Coefficient layer `j`: the rational vector of `a^j` coefficients.
    pub fn layer(&self, j: usize) -> Vec<Q> {
        self.entries.iter().map(|e| e.coeffs()[j].clone()).collect()
    }

    pub fn layers(&self) -> Vec<Vec<Q>> {
        (0..self.field.degree()).map(|j| self.layer(j)).collect()
    }

    pub fn from_layers(field: &NumberField, layers: &[Vec<Q>]) -> Self {
        let n = layers.first().map_or(0, Vec::len);
        let entries = (0..n)
            .map(|i| {
                field
                    .element(layers.iter().map(|l| l[i].clone()).collect())
                    .expect("one layer per power-basis coefficient")
            })
            .collect();
        FieldVector {
            field: field.clone(),
            entries,
        }
    }

    /// `M v` for a rational matrix `M`, applied to each coefficient layer.
    pub fn apply_rational(&self, m: &[Vec<Q>]) -> FieldVector {
        let layers: Vec<Vec<Q>> = self.layers().iter().map(|l| mat_vec(m, l)).collect();
        FieldVector::from_layers(&self.field, &layers)
    }

    pub fn scale(&self, k: &FieldElement) -> FieldVector {
        FieldVector {
            field: self.field.clone(),
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(FieldVector {
            field: self.field.clone(),
            entries,
        })
    }

    /// First nonzero entry, if any.
    pub fn leading(&self) -> Option<&FieldElement> {
        self.entries.iter().find(|e| !e.is_zero())
    }

    pub fn to_compact(&self) -> String {
        let xs: Vec<String> = self.entries.iter().map(|e| e.to_compact()).collect();
        format!("({})", xs.join(","))
    }
}

/// `q . v` for a rational vector `q`.
pub fn dot(q: &[Q], v: &FieldVector) -> Result<FieldElement> {
    if q.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            found: q.len(),
        });
    }
    let coeffs = v
        .layers()
        .iter()
        .map(|l| crate::rational::dot(q, l))
        .collect();
    v.field().element(coeffs)
}

/// `{q in Q^n : q . r = 0 for every row r}`, via the stacked coefficient layers.
pub fn rational_kernel(rows: &[FieldVector], n: usize) -> Result<RationalSubspace> {
    let mut stacked = Vec::new();
    let field = rows.first().map(|r| r.field().clone());
    for r in rows {
        if Some(r.field()) != field.as_ref() {
            return Err(Error::FieldMismatch);
        }
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        stacked.extend(r.layers());
    }
    Ok(nullspace(&stacked, n))
}
