//! Exact arithmetic in a real algebraic number field `Q(a)`.
//!
//! A field is fixed by a monic irreducible integer polynomial and a rational
//! interval isolating one of its real roots. Elements are coefficient vectors
//! over the power basis `1, a, ..., a^(d-1)`, which makes equality a plain
//! comparison of coefficients. Signs are decided by interval refinement of the
//! root, with an exact root-separation bound as the termination guarantee.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, q, Q};

/// Bisection rounds spent in [`FieldElement::sign`] before switching to the
/// separation bound.
pub const SIGN_BISECTION_CAP: usize = 64;

/// Width (as a power of two) the isolating interval is narrowed to when the
/// field is built.
const CACHED_INTERVAL_BITS: u64 = 64;

#[derive(Debug)]
struct FieldData {
    min_poly: Vec<BigInt>,
    lo: Q,
    hi: Q,
    /// Narrow isolating interval, or a point when the root is rational.
    narrow: (Q, Q),
}

/// A real number field `Q(a)` given by the minimal polynomial of `a` and an
/// isolating interval for the chosen real root.
#[derive(Clone)]
pub struct NumberField(Arc<FieldData>);

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.describe())
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.min_poly != other.0.min_poly {
            return false;
        }
        let (a, b) = (&self.0.narrow, &other.0.narrow);
        let lo = a.0.clone().max(b.0.clone());
        let hi = a.1.clone().min(b.1.clone());
        if lo > hi {
            return false;
        }
        if lo == hi {
            return poly_eval_int(&self.0.min_poly, &lo).is_zero();
        }
        count_roots(&sturm_sequence(&self.0.min_poly), &lo, &hi) > 0
    }
}

impl Eq for NumberField {}

impl NumberField {
    /// The field of rationals, presented as `Q(0)` with minimal polynomial `x`.
    pub fn rationals() -> Self {
        Self::new(&[0, 1], q(-1), q(1)).expect("x is irreducible")
    }

    /// `Q(sqrt 2)` with the positive root.
    pub fn sqrt2() -> Self {
        Self::new(&[-2, 0, 1], q(1), q(2)).expect("x^2 - 2 is irreducible")
    }

    pub fn new(min_poly: &[i64], lo: Q, hi: Q) -> Result<Self> {
        let poly: Vec<BigInt> = min_poly.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_big(poly, lo, hi, false)
    }

    /// Builds a field, checking monicity, irreducibility and root isolation.
    ///
    /// Irreducibility is only decided for degree at most 4; beyond that the
    /// caller must vouch for it with `assert_irreducible`.
    pub fn from_big(
        mut min_poly: Vec<BigInt>,
        lo: Q,
        hi: Q,
        assert_irreducible: bool,
    ) -> Result<Self> {
        while min_poly.len() > 1 && min_poly.last().is_some_and(|c| c.is_zero()) {
            min_poly.pop();
        }
        let degree = min_poly.len().saturating_sub(1);
        if degree == 0 {
            return Err(Error::InvalidPolynomial("constant polynomial".into()));
        }
        if !min_poly[degree].is_one() {
            return Err(Error::InvalidPolynomial("not monic".into()));
        }
        if !assert_irreducible {
            check_irreducible(&min_poly)?;
        }
        if lo >= hi {
            return Err(Error::BadIsolatingInterval("lo must be < hi".into()));
        }
        let sturm = sturm_sequence(&min_poly);
        let mut roots = count_roots(&sturm, &lo, &hi);
        if poly_eval_int(&min_poly, &lo).is_zero() {
            roots += 1;
        }
        if roots != 1 {
            return Err(Error::BadIsolatingInterval(format!(
                "[{}, {}] contains {roots} real roots",
                fmt_q(&lo),
                fmt_q(&hi)
            )));
        }
        let narrow = if degree == 1 {
            let r = Q::from_integer(-min_poly[0].clone());
            (r.clone(), r)
        } else {
            let mut iv = (lo.clone(), hi.clone());
            let target = Q::new(BigInt::one(), BigInt::one() << CACHED_INTERVAL_BITS);
            while &iv.1 - &iv.0 > target {
                bisect_root(&min_poly, &mut iv);
            }
            iv
        };
        Ok(NumberField(Arc::new(FieldData {
            min_poly,
            lo,
            hi,
            narrow,
        })))
    }

    pub fn degree(&self) -> usize {
        self.0.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.0.min_poly
    }

    pub fn isolating_interval(&self) -> (&Q, &Q) {
        (&self.0.lo, &self.0.hi)
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: vec![Q::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(Q::one())
    }

    pub fn from_rational(&self, x: Q) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = x;
        e
    }

    /// The generator `a`. In a degree-one field this is the rational root.
    pub fn generator(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_rational(self.0.narrow.0.clone());
        }
        let mut e = self.zero();
        e.coeffs[1] = Q::one();
        e
    }

    /// Element with the given power-basis coefficients.
    pub fn element(&self, coeffs: Vec<Q>) -> Result<FieldElement> {
        if coeffs.len() != self.degree() {
            return Err(Error::DimensionMismatch {
                expected: self.degree(),
                found: coeffs.len(),
            });
        }
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    /// Reduces an arbitrary-length coefficient vector modulo the minimal polynomial.
    pub fn reduce(&self, mut coeffs: Vec<Q>) -> FieldElement {
        let d = self.degree();
        let m = &self.0.min_poly;
        if d == 1 {
            // a is rational: evaluate outright
            let r = &self.0.narrow.0;
            let mut acc = Q::zero();
            for c in coeffs.iter().rev() {
                acc = acc * r + c;
            }
            return self.from_rational(acc);
        }
        for k in (d..coeffs.len()).rev() {
            let t = std::mem::take(&mut coeffs[k]);
            if t.is_zero() {
                continue;
            }
            for (i, mi) in m.iter().enumerate().take(d) {
                coeffs[k - d + i] -= &t * Q::from_integer(mi.clone());
            }
        }
        coeffs.resize(d, Q::zero());
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    pub(crate) fn narrow_interval(&self) -> &(Q, Q) {
        &self.0.narrow
    }

    /// Parses the compact element notation produced by [`FieldElement::to_compact`].
    pub fn parse_compact(&self, s: &str) -> Result<FieldElement> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let mut coeffs = vec![Q::zero(); self.degree().max(2)];
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        for term in terms {
            let (body, power) = match term.find('a') {
                None => (term, 0usize),
                Some(pos) => {
                    let power = match &term[pos + 1..] {
                        "" => 1,
                        p => p
                            .strip_prefix('^')
                            .and_then(|p| p.parse().ok())
                            .ok_or_else(|| Error::Parse(format!("bad power in {term:?}")))?,
                    };
                    (term[..pos].trim_end_matches('*'), power)
                }
            };
            let c = match body {
                "" | "+" => Q::one(),
                "-" => -Q::one(),
                b => parse_q(b.strip_prefix('+').unwrap_or(b))?,
            };
            if power >= coeffs.len() {
                coeffs.resize(power + 1, Q::zero());
            }
            coeffs[power] += c;
        }
        if self.degree() == 1 && coeffs.iter().skip(1).any(|c| !c.is_zero()) {
            return Err(Error::Parse(format!("{s:?} uses a but the field is Q")));
        }
        Ok(self.reduce(coeffs))
    }

    fn describe(&self) -> String {
        let poly: Vec<String> = self.0.min_poly.iter().map(|c| c.to_string()).collect();
        format!(
            "[{}] in [{}, {}]",
            poly.join(", "),
            fmt_q(&self.0.lo),
            fmt_q(&self.0.hi)
        )
    }
}

/// An element `c_0 + c_1 a + ... + c_{d-1} a^(d-1)` of a [`NumberField`].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: NumberField,
    coeffs: Vec<Q>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// How [`FieldElement::sign_with_cap`] reached its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPath {
    Exact,
    Interval,
    SeparationBound,
}

impl FieldElement {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Q> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.coeffs.len();
        if d == 1 {
            return self.field.from_rational(&self.coeffs[0] * &other.coeffs[0]);
        }
        let mut prod = vec![Q::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        self.field.reduce(prod)
    }

    pub fn scale(&self, k: &Q) -> Self {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Matrix of `x -> self * x` on the power basis, acting on coefficient columns.
    pub(crate) fn multiplication_matrix(&self) -> Vec<Vec<Q>> {
        let d = self.field.degree();
        let mut basis = self.field.one();
        let gen = if d > 1 {
            let mut g = self.field.zero();
            g.coeffs[1] = Q::one();
            g
        } else {
            self.field.one()
        };
        let columns: Vec<Vec<Q>> = (0..d)
            .map(|_| {
                let col = self.mul_unchecked(&basis);
                basis = basis.mul_unchecked(&gen);
                col.coeffs
            })
            .collect();
        crate::linalg::transpose(&columns)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.field.from_rational(r.recip()));
        }
        let m = self.multiplication_matrix();
        let d = m.len();
        let mut rhs = vec![Q::zero(); d];
        rhs[0] = Q::one();
        let x = crate::linalg::solve_square(m, rhs).ok_or(Error::DivisionByZero)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs: x,
        })
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact sign of the real number, compared against zero.
    pub fn sign(&self) -> Ordering {
        self.sign_with_cap(SIGN_BISECTION_CAP).0
    }

    /// Sign determination with an explicit bisection cap. After `cap` rounds
    /// the refinement continues only as far as the separation bound requires.
    pub fn sign_with_cap(&self, cap: usize) -> (Ordering, SignPath) {
        if self.is_zero() {
            return (Ordering::Equal, SignPath::Exact);
        }
        if let Some(r) = self.as_rational() {
            return (r.cmp(&Q::zero()), SignPath::Exact);
        }
        if self.field.degree() == 1 {
            let v = &self.coeffs[0];
            return (v.cmp(&Q::zero()), SignPath::Exact);
        }
        let min_poly = &self.field.0.min_poly;
        let mut iv = self.field.narrow_interval().clone();
        for _ in 0..cap {
            if let Some(s) = enclosure_sign(&self.coeffs, &iv) {
                return (s, SignPath::Interval);
            }
            bisect_root(min_poly, &mut iv);
        }
        let bound = separation_bound(self);
        loop {
            let (lo, hi) = enclosure(&self.coeffs, &iv);
            if &hi - &lo < bound {
                let s = if lo > Q::zero() {
                    Ordering::Greater
                } else if hi < Q::zero() {
                    Ordering::Less
                } else {
                    unreachable!("nonzero element enclosure narrower than its separation bound")
                };
                return (s, SignPath::SeparationBound);
            }
            bisect_root(min_poly, &mut iv);
        }
    }

    /// Rational approximation of the real value (midpoint of the cached root interval).
    pub fn approx(&self) -> f64 {
        let (lo, hi) = self.field.narrow_interval();
        let mid = (lo + hi) / q(2);
        poly_eval(&self.coeffs, &mid).to_f64().unwrap_or(f64::NAN)
    }

    /// Compact text: rational terms in the generator `a`, e.g. `-3/2+a`.
    pub fn to_compact(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let var = match i {
                0 => String::new(),
                1 => "a".to_string(),
                k => format!("a^{k}"),
            };
            if i == 0 {
                out.push_str(&fmt_q(&mag));
            } else if mag.is_one() {
                out.push_str(&var);
            } else {
                out.push_str(&fmt_q(&mag));
                out.push('*');
                out.push_str(&var);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

// Operators panic on field mismatch; the checked_* methods report it instead.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|d| d.sign())
    }
}

// ---- polynomial helpers over Z and Q ----

fn poly_eval_int(p: &[BigInt], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * x + Q::from_integer(c.clone());
    }
    acc
}

fn poly_eval(p: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Mean-value enclosure of `p` over the interval.
fn enclosure(p: &[Q], iv: &(Q, Q)) -> (Q, Q) {
    let two = q(2);
    let mid = (&iv.0 + &iv.1) / &two;
    let radius = (&iv.1 - &iv.0) / &two;
    let center = poly_eval(p, &mid);
    let reach = iv.0.abs().max(iv.1.abs());
    // Lipschitz bound: sum |i c_i| reach^(i-1)
    let mut lip = Q::zero();
    let mut pow = Q::one();
    for (i, c) in p.iter().enumerate().skip(1) {
        lip += c.abs() * q(i as i64) * &pow;
        pow *= &reach;
    }
    let spread = lip * radius;
    (&center - &spread, center + spread)
}

fn enclosure_sign(p: &[Q], iv: &(Q, Q)) -> Option<Ordering> {
    let (lo, hi) = enclosure(p, iv);
    if lo > Q::zero() {
        Some(Ordering::Greater)
    } else if hi < Q::zero() {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Halves an interval known to contain exactly one simple root of `p`.
fn bisect_root(p: &[BigInt], iv: &mut (Q, Q)) {
    if iv.0 == iv.1 {
        return;
    }
    let mid = (&iv.0 + &iv.1) / q(2);
    let fm = poly_eval_int(p, &mid);
    if fm.is_zero() {
        *iv = (mid.clone(), mid);
        return;
    }
    let flo = poly_eval_int(p, &iv.0);
    if flo.is_zero() {
        iv.1 = iv.0.clone();
    } else if (flo.is_negative()) != (fm.is_negative()) {
        iv.1 = mid;
    } else {
        iv.0 = mid;
    }
}

/// Lower bound on `|x|` for a nonzero element, from the characteristic
/// polynomial of multiplication by `x` (which equals the resultant
/// `Res_t(m(t), y - c(t))` for monic `m`).
fn separation_bound(x: &FieldElement) -> Q {
    let charpoly = char_poly(&x.multiplication_matrix());
    let first = charpoly
        .iter()
        .position(|c| !c.is_zero())
        .expect("characteristic polynomial is monic");
    let tail = &charpoly[first..];
    let c0 = tail[0].abs();
    let max_rest = tail[1..]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Q::zero);
    &c0 / (&c0 + max_rest)
}

/// Characteristic polynomial (ascending coefficients, monic) by Faddeev-LeVerrier.
pub(crate) fn char_poly(a: &[Vec<Q>]) -> Vec<Q> {
    let n = a.len();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for (l, row) in m.iter().enumerate() {
                    if !a[i][l].is_zero() && !row[j].is_zero() {
                        s += &a[i][l] * &row[j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut trace = Q::zero();
        for i in 0..n {
            for l in 0..n {
                trace += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -trace / q(k as i64);
    }
    coeffs
}

fn poly_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r: Vec<Q> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let t = &r[dr] / lead;
        for (i, bi) in b.iter().enumerate() {
            r[dr - db + i] -= &t * bi;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn trim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn sturm_sequence(p: &[BigInt]) -> Vec<Vec<Q>> {
    let p0: Vec<Q> = p.iter().map(|c| Q::from_integer(c.clone())).collect();
    let p1: Vec<Q> = p0
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * q(i as i64))
        .collect();
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        if seq[n - 1].len() == 1 && seq[n - 1][0].is_zero() {
            seq.pop();
            break;
        }
        if seq[n - 1].len() == 1 {
            break;
        }
        let r: Vec<Q> = poly_rem(&seq[n - 2], &seq[n - 1])
            .into_iter()
            .map(|c| -c)
            .collect();
        seq.push(r);
    }
    seq
}

fn sign_changes(seq: &[Vec<Q>], x: &Q) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| poly_eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(lo, hi]`.
fn count_roots(seq: &[Vec<Q>], lo: &Q, hi: &Q) -> usize {
    sign_changes(seq, lo).saturating_sub(sign_changes(seq, hi))
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(-d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e.clone());
                out.push(-e);
            }
        }
        d += 1;
    }
    out
}

fn check_irreducible(p: &[BigInt]) -> Result<()> {
    let degree = p.len() - 1;
    if degree == 1 {
        return Ok(());
    }
    if degree > 4 {
        return Err(Error::UnsupportedDegree(degree));
    }
    if p[0].is_zero() {
        return Err(Error::Reducible("x divides the polynomial".into()));
    }
    // monic: rational roots are integer divisors of the constant term
    for r in divisors(&p[0]) {
        if poly_eval_int(p, &Q::from_integer(r.clone())).is_zero() {
            return Err(Error::Reducible(format!("root {r}")));
        }
    }
    if degree == 4 {
        // (x^2 + a x + b)(x^2 + c x + d) over Z
        let (a0, a1, a2, a3) = (&p[0], &p[1], &p[2], &p[3]);
        for b in divisors(a0) {
            let d = a0 / &b;
            let s = a3.clone();
            let prod = a2 - &b - &d;
            // a, c are the roots of t^2 - s t + prod
            let disc = &s * &s - BigInt::from(4) * &prod;
            if disc.is_negative() {
                continue;
            }
            let r = disc.sqrt();
            if &r * &r != disc || !(&s + &r).is_even() {
                continue;
            }
            for root in [(&s + &r) / 2, (&s - &r) / 2] {
                let a = root;
                let c = &s - &a;
                if &a * &d + &b * &c == *a1 {
                    return Err(Error::Reducible("splits into two quadratics".into()));
                }
            }
        }
    }
    Ok(())
}
