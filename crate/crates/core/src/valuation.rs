//! Monomial valuations on Laurent polynomials: `x^g` is sent to the class of
//! `g` modulo the residue group, represented by the tuple `(g . r_k)_k`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::decompose;
use crate::preorder::Preorder;
use crate::rational::{fmt_q, Q};
use crate::realfield::FieldElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientField {
    Rational,
    Prime(u32),
}

impl CoefficientField {
    pub fn prime(p: u32) -> Result<Self> {
        let p64 = u64::from(p);
        let prime = (2..1u64 << 31).contains(&p64)
            && (2..).take_while(|d| d * d <= p64).all(|d| !p64.is_multiple_of(d));
        if !prime {
            return Err(Error::Parse(format!("{} is not a prime below 2^31", p)));
        }
        Ok(CoefficientField::Prime(p))
    }

    pub fn name(&self) -> String {
        match self {
            CoefficientField::Rational => "Q".into(),
            CoefficientField::Prime(p) => format!("F_{}", p),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "Q" => Ok(CoefficientField::Rational),
            t => match t.strip_prefix("F_").and_then(|p| p.parse().ok()) {
                Some(p) => Self::prime(p),
                None => Err(Error::Parse(format!("unknown coefficient field {:?}", s))),
            },
        }
    }

    /// Brings a rational into the field; fails for denominators divisible by `p`.
    pub fn coerce(&self, x: &Q) -> Result<Coefficient> {
        match *self {
            CoefficientField::Rational => Ok(Coefficient::Rational(x.clone())),
            CoefficientField::Prime(p) => {
                let m = num_bigint::BigInt::from(p);
                let reduce = |v: &num_bigint::BigInt| -> u64 {
                    let r = v % &m;
                    let r = if r.is_negative() { r + &m } else { r };
                    u64::try_from(r).expect("residue below p")
                };
                let num = reduce(x.numer());
                let den = reduce(x.denom());
                if den == 0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(Coefficient::Modular(mul_mod(num, inv_mod(den, p as u64), p as u64)))
            }
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// A nonzero coefficient; residues mod `p` are kept in `1..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Rational(Q),
    Modular(u64),
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(x) => x.is_zero(),
            Coefficient::Modular(x) => *x == 0,
        }
    }

    fn add(&self, other: &Self, field: CoefficientField) -> Self {
        match (self, other, field) {
            (Coefficient::Rational(a), Coefficient::Rational(b), _) => Coefficient::Rational(a + b),
            (Coefficient::Modular(a), Coefficient::Modular(b), CoefficientField::Prime(p)) => {
                Coefficient::Modular((a + b) % p as u64)
            }
            _ => unreachable!("coefficients from one field"),
        }
    }

    fn mul(&self, other: &Self, field: CoefficientField) -> Self {
        match (self, other, field) {
            (Coefficient::Rational(a), Coefficient::Rational(b), _) => Coefficient::Rational(a * b),
            (Coefficient::Modular(a), Coefficient::Modular(b), CoefficientField::Prime(p)) => {
                Coefficient::Modular(mul_mod(*a, *b, p as u64))
            }
            _ => unreachable!("coefficients from one field"),
        }
    }

    fn neg(&self, field: CoefficientField) -> Self {
        match (self, field) {
            (Coefficient::Rational(a), _) => Coefficient::Rational(-a),
            (Coefficient::Modular(a), CoefficientField::Prime(p)) => {
                Coefficient::Modular((p as u64 - a) % p as u64)
            }
            _ => unreachable!("coefficients from one field"),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(x) => f.write_str(&fmt_q(x)),
            Coefficient::Modular(x) => write!(f, "{}", x),
        }
    }
}

/// Finite sum of `c_g x^g` with `g` in `Z^n`, stored sorted by exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolynomial {
    n: usize,
    field: CoefficientField,
    terms: BTreeMap<Vec<i64>, Coefficient>,
}

impl LaurentPolynomial {
    pub fn zero(field: CoefficientField, n: usize) -> Self {
        LaurentPolynomial {
            n,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(field: CoefficientField, exponent: Vec<i64>) -> Self {
        let one = field.coerce(&Q::one()).expect("1 is a unit");
        let n = exponent.len();
        let mut f = Self::zero(field, n);
        f.terms.insert(exponent, one);
        f
    }

    /// Builds from `(exponent, rational coefficient)` pairs, merging repeats.
    pub fn from_terms(
        field: CoefficientField,
        n: usize,
        terms: impl IntoIterator<Item = (Vec<i64>, Q)>,
    ) -> Result<Self> {
        let mut f = Self::zero(field, n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.len(),
                });
            }
            let c = field.coerce(&c)?;
            f.add_term(e, c);
        }
        Ok(f)
    }

    /// Convenience constructor from integer exponents and coefficients.
    pub fn from_int_terms(field: CoefficientField, n: usize, terms: &[(Vec<i64>, i64)]) -> Result<Self> {
        Self::from_terms(
            field,
            n,
            terms.iter().map(|(e, c)| (e.clone(), Q::from_integer((*c).into()))),
        )
    }

    fn add_term(&mut self, e: Vec<i64>, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let field = self.field;
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c, field);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient_field(&self) -> CoefficientField {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Coefficient> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
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

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg(self.field);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.field, self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2, self.field));
            }
        }
        Ok(out)
    }

    /// Multiplies by the monomial `x^g`.
    pub fn shift(&self, g: &[i64]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(g).map(|(a, b)| a + b).collect(), c.clone()))
            .collect();
        LaurentPolynomial {
            n: self.n,
            field: self.field,
            terms,
        }
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let e: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                format!("{}*x^({})", c, e.join(","))
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A value of a monomial valuation: `Infinity` or the tuple `(g . r_k)_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Infinity,
    Finite(Vec<FieldElement>),
}

impl Value {
    pub fn tuple(&self) -> Option<&[FieldElement]> {
        match self {
            Value::Infinity => None,
            Value::Finite(t) => Some(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Value::Finite(t) if t.iter().all(|x| x.is_zero()))
    }

    pub fn add(&self, other: &Value) -> Result<Value> {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => Ok(Value::Finite(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.checked_add(y))
                    .collect::<Result<_>>()?,
            )),
            _ => Ok(Value::Infinity),
        }
    }

    pub fn to_compact(&self) -> String {
        match self {
            Value::Infinity => "inf".into(),
            Value::Finite(t) => {
                let t: Vec<String> = t.iter().map(|x| x.to_compact()).collect();
                format!("({})", t.join(","))
            }
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Value::Infinity, Value::Infinity) => Some(Ordering::Equal),
            (Value::Infinity, _) => Some(Ordering::Greater),
            (_, Value::Infinity) => Some(Ordering::Less),
            (Value::Finite(a), Value::Finite(b)) => {
                if a.len() != b.len() {
                    return None;
                }
                for (x, y) in a.iter().zip(b) {
                    match x.checked_sub(y).ok()?.sign() {
                        Ordering::Equal => continue,
                        o => return Some(o),
                    }
                }
                Some(Ordering::Equal)
            }
        }
    }
}

fn check_dims(p: &Preorder, f: &LaurentPolynomial) -> Result<()> {
    if p.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: f.n(),
        });
    }
    Ok(())
}

fn exponent_value(p: &Preorder, g: &[i64]) -> Result<Value> {
    let g: Vec<Q> = g.iter().map(|&x| Q::from_integer(x.into())).collect();
    Ok(Value::Finite(p.values(&g)?))
}

/// An exponent of `f` attaining the minimum, the first in sorted order.
fn minimal_exponent<'a>(p: &Preorder, f: &'a LaurentPolynomial) -> Result<Option<&'a Vec<i64>>> {
    let mut best: Option<&Vec<i64>> = None;
    for e in f.terms.keys() {
        best = match best {
            Some(b) if p.compare(e, b)? != Ordering::Less => Some(b),
            _ => Some(e),
        };
    }
    Ok(best)
}

pub fn valuate(p: &Preorder, f: &LaurentPolynomial) -> Result<Value> {
    check_dims(p, f)?;
    match minimal_exponent(p, f)? {
        None => Ok(Value::Infinity),
        Some(g) => exponent_value(p, g),
    }
}

/// The terms of `f` whose exponent attains the minimum.
pub fn initial_form(p: &Preorder, f: &LaurentPolynomial) -> Result<LaurentPolynomial> {
    check_dims(p, f)?;
    let g = minimal_exponent(p, f)?.ok_or(Error::ZeroPolynomial)?.clone();
    let mut out = LaurentPolynomial::zero(f.field, f.n);
    for (e, c) in &f.terms {
        if p.compare(e, &g)? == Ordering::Equal {
            out.terms.insert(e.clone(), c.clone());
        }
    }
    Ok(out)
}

/// `valuate(f) - valuate(g)`, the value of `f / g`.
pub fn valuate_ratio(p: &Preorder, f: &LaurentPolynomial, g: &LaurentPolynomial) -> Result<Value> {
    let vg = valuate(p, g)?;
    let Value::Finite(b) = vg else {
        return Err(Error::DivisionByZero);
    };
    match valuate(p, f)? {
        Value::Infinity => Ok(Value::Infinity),
        Value::Finite(a) => Ok(Value::Finite(
            a.iter()
                .zip(&b)
                .map(|(x, y)| x.checked_sub(y))
                .collect::<Result<_>>()?,
        )),
    }
}

/// Outcome of comparing `nu_p1` with the composite of its head and tail.
#[derive(Clone, Debug)]
pub struct CompositionReport {
    pub k: usize,
    /// `nu_p1(f)`.
    pub direct: Value,
    /// `nu_head(f)`, the first `k` components.
    pub head: Value,
    pub initial_form: LaurentPolynomial,
    /// Exponent of the initial form used as base point.
    pub base: Vec<i64>,
    /// The initial form shifted by `x^-base`, in coordinates of the residue basis.
    pub pushed: LaurentPolynomial,
    /// `nu_tail(pushed)`, in the tail's own canonical rows.
    pub tail: Value,
    /// `nu_p1` of the exponent assembled from the base point and the tail minimum.
    pub composite: Value,
    pub passed: bool,
}

/// Checks `nu_p1 = nu_head o nu_tail` on `f` for the decomposition at level `k`.
///
/// The head determines the first `k` components and selects the initial form.
/// The tail, a preorder on the residue group of the head, then ranks the
/// exponents of that initial form after translating them into the residue
/// group. The exponent it picks, moved back to `Z^n`, must carry the same
/// value under `p1` as the direct minimum.
pub fn check_composition(p1: &Preorder, k: usize, f: &LaurentPolynomial) -> Result<CompositionReport> {
    check_dims(p1, f)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (head, tail, basis) = decompose(p1, k)?;
    let direct = valuate(p1, f)?;
    let head_value = valuate(&head, f)?;
    let init = initial_form(&head, f)?;
    let base = init.terms.keys().next().expect("nonzero").clone();
    let residue = &p1.flag()[k];
    let mut pushed = LaurentPolynomial::zero(f.field, basis.len());
    let mut preimage: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    for (e, c) in &init.terms {
        let h: Vec<i64> = e.iter().zip(&base).map(|(a, b)| a - b).collect();
        // echelon basis: coordinates are the pivot entries, integers here
        let coords: Vec<i64> = residue.pivots().iter().map(|&j| h[j]).collect();
        debug_assert!(residue.contains_int(&h));
        preimage.insert(coords.clone(), e.clone());
        pushed.terms.insert(coords, c.clone());
    }
    let tail_value = valuate(&tail, &pushed)?;
    let chosen = minimal_exponent(&tail, &pushed)?.expect("nonzero");
    let exponent = &preimage[chosen];
    let composite = exponent_value(p1, exponent)?;
    let head_matches = match (&direct, &head_value) {
        (Value::Finite(a), Value::Finite(b)) => a[..k] == b[..],
        _ => false,
    };
    let passed = head_matches && composite == direct;
    Ok(CompositionReport {
        k,
        direct,
        head: head_value,
        initial_form: init,
        base,
        pushed,
        tail: tail_value,
        composite,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realfield::NumberField;

    const QQ: CoefficientField = CoefficientField::Rational;

    fn lex() -> Preorder {
        Preorder::from_int_rows(&NumberField::rationals(), &[vec![1, 0], vec![0, 1]], 2).unwrap()
    }

    fn poly(terms: &[(Vec<i64>, i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_int_terms(QQ, 2, terms).unwrap()
    }

    fn ints(f: &NumberField, t: &[i64]) -> Value {
        Value::Finite(t.iter().map(|&x| f.from_rational(Q::from_integer(x.into()))).collect())
    }

    #[test]
    fn coefficient_fields() {
        assert_eq!(CoefficientField::parse("F_5").unwrap(), CoefficientField::Prime(5));
        assert!(CoefficientField::parse("F_6").is_err());
        assert!(CoefficientField::prime(2147483647).is_ok());
        let f5 = CoefficientField::Prime(5);
        let f = LaurentPolynomial::from_int_terms(f5, 1, &[(vec![0], 3), (vec![0], 2)]).unwrap();
        assert!(f.is_zero());
        let half = f5.coerce(&crate::rational::qf(1, 2)).unwrap();
        assert_eq!(half, Coefficient::Modular(3));
    }

    #[test]
    fn basic_values() {
        let p = lex();
        let r = NumberField::rationals();
        assert_eq!(valuate(&p, &LaurentPolynomial::zero(QQ, 2)).unwrap(), Value::Infinity);
        let f = poly(&[(vec![1, 0], 1), (vec![0, 1], 1)]);
        // (0,1) is lex-smaller than (1,0)
        assert_eq!(valuate(&p, &f).unwrap(), ints(&r, &[0, 1]));
        let k = NumberField::sqrt2();
        let p = Preorder::from_compact_rows(&k, &[vec!["1", "a"]], 2).unwrap();
        let f = poly(&[(vec![2, -1], 1), (vec![1, 1], 1)]);
        let v = valuate(&p, &f).unwrap();
        assert_eq!(v.to_compact(), "(2-a)");
    }

    #[test]
    fn initial_forms() {
        let r = NumberField::rationals();
        let p = Preorder::from_int_rows(&r, &[vec![1, 1]], 2).unwrap();
        let f = poly(&[(vec![1, 0], 1), (vec![0, 1], 1), (vec![1, 1], 1)]);
        assert_eq!(
            initial_form(&p, &f).unwrap(),
            poly(&[(vec![1, 0], 1), (vec![0, 1], 1)])
        );
        let t = Preorder::trivial(&r, 2);
        assert_eq!(initial_form(&t, &f).unwrap(), f);
        assert_eq!(
            initial_form(&p, &LaurentPolynomial::zero(QQ, 2)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn ratios() {
        let p = lex();
        let r = NumberField::rationals();
        let f = poly(&[(vec![1, 0], 2), (vec![3, -1], 1)]);
        assert!(valuate_ratio(&p, &f, &f).unwrap().is_zero());
        let xy = poly(&[(vec![1, 1], 1)]);
        let y = poly(&[(vec![0, 1], 1)]);
        assert_eq!(valuate_ratio(&p, &xy, &y).unwrap(), ints(&r, &[1, 0]));
        let zero = LaurentPolynomial::zero(QQ, 2);
        assert_eq!(valuate_ratio(&p, &zero, &y).unwrap(), Value::Infinity);
        assert_eq!(valuate_ratio(&p, &y, &zero), Err(Error::DivisionByZero));
    }

    #[test]
    fn composition_reports() {
        let p = lex();
        let f = poly(&[(vec![1, 0], 1), (vec![1, 1], 1), (vec![0, 2], 1)]);
        for k in 0..=2 {
            assert!(check_composition(&p, k, &f).unwrap().passed, "k = {}", k);
        }
        let rep = check_composition(&p, 1, &f).unwrap();
        let r = NumberField::rationals();
        assert_eq!(rep.head, ints(&r, &[0]));
        assert_eq!(rep.initial_form, poly(&[(vec![0, 2], 1)]));
        assert_eq!(rep.tail, ints(&r, &[0]));
        assert_eq!(rep.direct, ints(&r, &[0, 2]));
        let rep = check_composition(&p, 2, &f).unwrap();
        assert!(rep.tail.is_zero() && rep.tail.tuple().unwrap().is_empty());
        let rep = check_composition(&p, 0, &f).unwrap();
        assert_eq!(rep.initial_form, f);
        assert!(matches!(check_composition(&p, 3, &f), Err(Error::Range { .. })));
    }

    #[test]
    fn value_order() {
        let r = NumberField::rationals();
        assert!(ints(&r, &[0, 5]) < ints(&r, &[1, -3]));
        assert!(ints(&r, &[7]) < Value::Infinity);
    }
}
