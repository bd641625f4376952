//! Preorders on `Q^n` in canonical form.
//!
//! A preorder is given by functionals `r_1, ..., r_s` with real entries and
//! compares `u`, `v` by the lexicographic order of `(u.r_k)_k` against
//! `(v.r_k)_k`. The canonical form keeps each row projected onto the rational
//! kernel of the rows before it, with its first nonzero entry scaled to `+-1`,
//! and drops rows that add nothing. Two matrices define the same preorder iff
//! their canonical forms coincide.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rational_kernel, FieldVector, RationalSubspace};
use crate::rational::{denom_lcm, Q};
use crate::realfield::{FieldElement, NumberField};

/// Sign of a group element against a preorder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignClass {
    Neg,
    Zero,
    Pos,
}

impl SignClass {
    pub fn negate(self) -> Self {
        match self {
            SignClass::Neg => SignClass::Pos,
            SignClass::Zero => SignClass::Zero,
            SignClass::Pos => SignClass::Neg,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SignClass::Neg => "-",
            SignClass::Zero => "0",
            SignClass::Pos => "+",
        }
    }

    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => SignClass::Neg,
            Ordering::Equal => SignClass::Zero,
            Ordering::Greater => SignClass::Pos,
        }
    }
}

/// Integer form of a row: `u . row` has power-basis coefficients
/// `(sum_i u_i numer[j][i]) / denom`, and `denom > 0` so it never changes a sign.
#[derive(Clone, Debug)]
struct RowKernel {
    numer: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i64>>>,
}

impl RowKernel {
    fn new(row: &FieldVector) -> Self {
        let layers = row.layers();
        let denom = denom_lcm(layers.iter().flatten());
        let numer: Vec<Vec<BigInt>> = layers
            .iter()
            .map(|l| l.iter().map(|x| (x * &denom).to_integer()).collect())
            .collect();
        let small = numer
            .iter()
            .map(|l| {
                l.iter()
                    .map(|x| x.to_i64().filter(|v| v.unsigned_abs() < (1 << 40)))
                    .collect::<Option<Vec<i64>>>()
            })
            .collect::<Option<Vec<_>>>();
        RowKernel { numer, small }
    }

    fn coefficients(&self, u: &[i64]) -> Vec<BigInt> {
        if let Some(small) = &self.small {
            if u.iter().all(|x| x.unsigned_abs() < (1 << 20)) {
                return small
                    .iter()
                    .map(|l| {
                        let s: i128 = l.iter().zip(u).map(|(a, b)| *a as i128 * *b as i128).sum();
                        BigInt::from(s)
                    })
                    .collect();
            }
        }
        self.numer
            .iter()
            .map(|l| l.iter().zip(u).map(|(a, &b)| a * b).sum())
            .collect()
    }
}

/// A preorder on `Q^n` (equivalently on `Z^n`) in canonical kernel-flag form.
#[derive(Clone)]
pub struct Preorder {
    n: usize,
    field: NumberField,
    rows: Vec<FieldVector>,
    /// `W_0 = Q^n` down to `W_s`, the residue group.
    flag: Vec<RationalSubspace>,
    kernels: Vec<RowKernel>,
    alpha: f64,
}

impl PartialEq for Preorder {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.field == other.field && self.rows == other.rows
    }
}

impl Eq for Preorder {}

impl fmt::Debug for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on Q^{}", self.label(), self.n)
    }
}

impl Preorder {
    /// The trivial preorder, in which every element is equivalent to zero.
    pub fn trivial(field: &NumberField, n: usize) -> Self {
        Self::assemble(field, n, Vec::new(), vec![RationalSubspace::full(n)])
    }

    /// Canonicalizes a raw defining matrix.
    pub fn from_rows(field: &NumberField, raw_rows: &[FieldVector], n: usize) -> Result<Self> {
        let mut w = RationalSubspace::full(n);
        let mut rows = Vec::new();
        let mut flag = vec![w.clone()];
        for raw in raw_rows {
            if raw.field() != field {
                return Err(Error::FieldMismatch);
            }
            if raw.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: raw.len(),
                });
            }
            if w.dim() == 0 {
                break;
            }
            let p = w.project(raw)?;
            let Some(lead) = p.leading() else {
                continue;
            };
            let scale = lead.abs().inverse()?;
            let p = p.scale(&scale);
            w = w.intersect(&rational_kernel(std::slice::from_ref(&p), n)?)?;
            rows.push(p);
            flag.push(w.clone());
        }
        Ok(Self::assemble(field, n, rows, flag))
    }

    /// Convenience constructor from rows of integers.
    pub fn from_int_rows(field: &NumberField, rows: &[Vec<i64>], n: usize) -> Result<Self> {
        let rows: Vec<FieldVector> = rows
            .iter()
            .map(|r| FieldVector::from_ints(field, r))
            .collect();
        Self::from_rows(field, &rows, n)
    }

    /// Rows written in the compact element notation, e.g. `[["1", "a"]]`.
    pub fn from_compact_rows(field: &NumberField, rows: &[Vec<&str>], n: usize) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                let entries = r
                    .iter()
                    .map(|s| field.parse_compact(s))
                    .collect::<Result<Vec<_>>>()?;
                FieldVector::new(field, entries)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, &rows, n)
    }

    pub(crate) fn assemble(
        field: &NumberField,
        n: usize,
        rows: Vec<FieldVector>,
        flag: Vec<RationalSubspace>,
    ) -> Self {
        debug_assert_eq!(flag.len(), rows.len() + 1);
        debug_assert!(flag.windows(2).all(|w| w[1].dim() < w[0].dim()));
        let kernels = rows.iter().map(RowKernel::new).collect();
        let (lo, hi) = field.narrow_interval();
        let alpha = ((lo + hi) / Q::from_integer(2.into()))
            .to_f64()
            .unwrap_or(0.0);
        let p = Preorder {
            n,
            field: field.clone(),
            rows,
            flag,
            kernels,
            alpha,
        };
        debug_assert_eq!(p.type_of().iter().sum::<usize>() + p.degree(), n);
        debug_assert!(p.rank() + p.degree() <= n);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn rows(&self) -> &[FieldVector] {
        &self.rows
    }

    /// `W_0 = Q^n`, ..., `W_s`.
    pub fn flag(&self) -> &[RationalSubspace] {
        &self.flag
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Dimension of the residue group.
    pub fn degree(&self) -> usize {
        self.flag.last().map_or(self.n, RationalSubspace::dim)
    }

    /// `(d_1, ..., d_s)` with `d_k = dim W_(k-1) - dim W_k`.
    pub fn type_of(&self) -> Vec<usize> {
        self.flag.windows(2).map(|w| w[0].dim() - w[1].dim()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }

    /// The residue group `W_s = {u : u ~ 0}`.
    pub fn residue_group(&self) -> &RationalSubspace {
        self.flag.last().expect("flag always holds W_0")
    }

    /// The isolated subgroups `W_s, W_(s-1), ..., W_0`.
    pub fn isolated_chain(&self) -> Vec<RationalSubspace> {
        self.flag.iter().rev().cloned().collect()
    }

    pub(crate) fn same_space(&self, other: &Preorder) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            })
        }
    }

    /// Sign of the value `u . row_k` for a single row.
    pub fn row_sign(&self, k: usize, u: &[i64]) -> Ordering {
        let coeffs = self.kernels[k].coefficients(u);
        self.coefficient_sign(coeffs)
    }

    fn coefficient_sign(&self, coeffs: Vec<BigInt>) -> Ordering {
        if coeffs.iter().skip(1).all(Zero::is_zero) {
            return coeffs[0].sign().cmp(&num_bigint::Sign::NoSign);
        }
        // floating filter, exact fallback
        let fs: Option<Vec<f64>> = coeffs
            .iter()
            .map(|c| c.to_f64().filter(|v| v.abs() < 4.5e15))
            .collect();
        if let Some(fs) = fs {
            let mut value = 0.0;
            let mut scale = 0.0;
            let mut pow = 1.0;
            let reach = self.alpha.abs().max(1.0);
            let mut reach_pow = 1.0;
            for c in &fs {
                value += c * pow;
                scale += c.abs() * reach_pow;
                pow *= self.alpha;
                reach_pow *= reach;
            }
            if value.abs() > scale * 1e-9 {
                return value.partial_cmp(&0.0).expect("finite");
            }
        }
        let coeffs = coeffs.into_iter().map(Q::from_integer).collect();
        self.field
            .element(coeffs)
            .expect("row layers match field degree")
            .sign()
    }

    /// Classifies `u` as below, equivalent to, or above zero.
    pub fn sign_of(&self, u: &[i64]) -> Result<SignClass> {
        self.check_len(u.len())?;
        Ok(self.sign_unchecked(u))
    }

    pub(crate) fn sign_unchecked(&self, u: &[i64]) -> SignClass {
        if u.iter().all(|&x| x == 0) {
            return SignClass::Zero;
        }
        for k in 0..self.rows.len() {
            match self.row_sign(k, u) {
                Ordering::Equal => continue,
                o => return SignClass::from_ordering(o),
            }
        }
        SignClass::Zero
    }

    /// Sign of a rational vector, after clearing denominators.
    pub fn sign_of_rational(&self, u: &[Q]) -> Result<SignClass> {
        self.check_len(u.len())?;
        let l = denom_lcm(u);
        let ints: Vec<BigInt> = u.iter().map(|x| (x * &l).to_integer()).collect();
        if let Some(small) = ints.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>() {
            return Ok(self.sign_unchecked(&small));
        }
        for k in 0..self.rows.len() {
            let coeffs = self.kernels[k]
                .numer
                .iter()
                .map(|l| l.iter().zip(&ints).map(|(a, b)| a * b).sum())
                .collect();
            match self.coefficient_sign(coeffs) {
                Ordering::Equal => continue,
                o => return Ok(SignClass::from_ordering(o)),
            }
        }
        Ok(SignClass::Zero)
    }

    /// Compares `u` and `v`: `Less` when `u` is strictly below `v`.
    pub fn compare(&self, u: &[i64], v: &[i64]) -> Result<Ordering> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let d: Vec<i64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
        Ok(match self.sign_unchecked(&d) {
            SignClass::Neg => Ordering::Less,
            SignClass::Zero => Ordering::Equal,
            SignClass::Pos => Ordering::Greater,
        })
    }

    /// Membership of the preorder in `O_u = {u >= 0}`.
    pub fn in_o(&self, u: &[i64]) -> Result<bool> {
        Ok(self.sign_of(u)? != SignClass::Neg)
    }

    /// Membership of the preorder in `U_u = {u > 0}`.
    pub fn in_u(&self, u: &[i64]) -> Result<bool> {
        Ok(self.sign_of(u)? == SignClass::Pos)
    }

    /// Values `(u . r_1, ..., u . r_s)` as field elements.
    pub fn values(&self, u: &[Q]) -> Result<Vec<FieldElement>> {
        self.check_len(u.len())?;
        self.rows.iter().map(|r| crate::linalg::dot(u, r)).collect()
    }

    /// Compact label such as `lex[(1,0);(0,1)]`, or `lex[]` when trivial.
    pub fn label(&self) -> String {
        let rows: Vec<String> = self.rows.iter().map(FieldVector::to_compact).collect();
        format!("lex[{}]", rows.join(";"))
    }

    /// Parses a [`Preorder::label`] back into a preorder.
    pub fn parse_label(field: &NumberField, label: &str, n: usize) -> Result<Self> {
        let inner = label
            .trim()
            .strip_prefix("lex[")
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("bad label {label:?}")))?;
        if inner.is_empty() {
            return Ok(Self::trivial(field, n));
        }
        let rows = inner
            .split(';')
            .map(|r| {
                let body = r
                    .trim()
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("bad row {r:?}")))?;
                let entries = body
                    .split(',')
                    .map(|e| field.parse_compact(e))
                    .collect::<Result<Vec<_>>>()?;
                FieldVector::new(field, entries)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, &rows, n)
    }
}

/// Integer vectors in `{-k..k}^n`, in lexicographic order.
pub fn box_points(n: usize, k: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * k + 1) as u64;
    let total = side.checked_pow(n as u32).expect("box too large");
    (0..total).map(move |mut idx| {
        let mut v = vec![0i64; n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % side) as i64 - k;
            idx /= side;
        }
        v
    })
}

/// Gcd-free helper: the primitive integer direction of an integer vector.
pub fn primitive(u: &[i64]) -> Vec<i64> {
    let g = u.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return u.to_vec();
    }
    u.iter().map(|x| x / g.abs()).collect()
}

/// Direct lexicographic evaluation on raw rows, independent of canonicalization.
pub fn raw_sign(rows: &[FieldVector], u: &[i64]) -> SignClass {
    let uq: Vec<Q> = u.iter().map(|&x| Q::from_integer(x.into())).collect();
    for r in rows {
        let v = crate::linalg::dot(&uq, r).expect("dimensions match");
        match v.sign() {
            Ordering::Equal => continue,
            o => return SignClass::from_ordering(o),
        }
    }
    SignClass::Zero
}
