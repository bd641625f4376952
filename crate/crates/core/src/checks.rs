//! Seeded random generators and the property suites behind `zr check`.

use std::cmp::Ordering;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::action::{
    apply, is_positive_scalar_on_quotient, is_stabilizer, orbit_witness, stabilizes_via_quotient,
    Automorphism,
};
use crate::lattice::{compose, decompose, meet, refines, truncate};
use crate::linalg::{determinant, FieldVector};
use crate::preorder::{box_points, raw_sign, Preorder, SignClass};
use crate::rational::Q;
use crate::realfield::{FieldElement, NumberField};
use crate::topology::{distance, shell_points, Distance};
use crate::valuation::{
    check_composition, initial_form, valuate, CoefficientField, LaurentPolynomial, Value,
};

pub type CheckRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CheckRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small element of `field`: integer coefficients in `-bound..=bound`, with an
/// occasional denominator.
pub fn random_element(rng: &mut CheckRng, field: &NumberField, bound: i64) -> FieldElement {
    let coeffs = (0..field.degree())
        .map(|_| {
            let num = rng.gen_range(-bound..=bound);
            let den = if rng.gen_bool(0.2) { rng.gen_range(2..=3) } else { 1 };
            Q::new(num.into(), den.into())
        })
        .collect();
    field.element(coeffs).expect("degree-length vector")
}

/// Raw rows of a random preorder: up to `n` rows with sparse small entries,
/// sometimes repeating a rational direction so canonicalization has work to do.
pub fn random_rows(rng: &mut CheckRng, field: &NumberField, n: usize) -> Vec<FieldVector> {
    let count = rng.gen_range(0..=n);
    let mut rows: Vec<FieldVector> = Vec::with_capacity(count);
    for _ in 0..count {
        if !rows.is_empty() && rng.gen_bool(0.1) {
            let i = rng.gen_range(0..rows.len());
            rows.push(rows[i].clone());
            continue;
        }
        let entries = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    field.zero()
                } else if rng.gen_bool(0.5) {
                    field.from_rational(Q::from_integer(rng.gen_range(-3i64..=3).into()))
                } else {
                    random_element(rng, field, 3)
                }
            })
            .collect();
        rows.push(FieldVector::new(field, entries).expect("entries share the field"));
    }
    rows
}

pub fn random_preorder(rng: &mut CheckRng, field: &NumberField, n: usize) -> Preorder {
    let rows = random_rows(rng, field, n);
    Preorder::from_rows(field, &rows, n).expect("rows have length n")
}

/// Product of elementary integer operations and a signed permutation.
pub fn random_unimodular(rng: &mut CheckRng, n: usize) -> Automorphism {
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| Q::from_integer(((i == j) as i64).into())).collect())
        .collect();
    if n > 1 {
        for _ in 0..2 * n {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = Q::from_integer(rng.gen_range(-2i64..=2).into());
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(&src) {
                *x += &c * y;
            }
        }
    }
    m.shuffle(rng);
    for row in m.iter_mut() {
        if rng.gen_bool(0.5) {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    Automorphism::new(m).expect("unimodular")
}

/// Random invertible rational matrix with small entries.
pub fn random_invertible(rng: &mut CheckRng, n: usize) -> Automorphism {
    loop {
        let m: Vec<Vec<Q>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let den = if rng.gen_bool(0.2) { 2 } else { 1 };
                        Q::new(rng.gen_range(-3i64..=3).into(), den.into())
                    })
                    .collect()
            })
            .collect();
        if !determinant(&m).is_zero() {
            return Automorphism::new(m).expect("nonzero determinant");
        }
    }
}

/// Random nonzero Laurent polynomial with up to `max_terms` terms.
pub fn random_polynomial(
    rng: &mut CheckRng,
    field: CoefficientField,
    n: usize,
    max_terms: usize,
) -> LaurentPolynomial {
    loop {
        let count = rng.gen_range(1..=max_terms);
        let terms: Vec<(Vec<i64>, Q)> = (0..count)
            .map(|_| {
                let e = (0..n).map(|_| rng.gen_range(-3i64..=3)).collect();
                let mut c = rng.gen_range(-4i64..=4);
                if c == 0 {
                    c = 1;
                }
                (e, Q::from_integer(c.into()))
            })
            .collect();
        let f = LaurentPolynomial::from_terms(field, n, terms).expect("consistent dims");
        if !f.is_zero() {
            return f;
        }
    }
}

/// Brute-force refinement test: every point of the box that is positive for
/// `coarse` is positive for `fine`.
pub fn refines_on_box(coarse: &Preorder, fine: &Preorder, k: i64) -> bool {
    box_points(coarse.n(), k).all(|u| {
        coarse.sign_of(&u).expect("same n") != SignClass::Pos
            || fine.sign_of(&u).expect("same n") == SignClass::Pos
    })
}

/// A point that is positive for `coarse` but not for `fine`, searched shell by
/// shell up to max-norm `max_level`.
pub fn refinement_counterexample(coarse: &Preorder, fine: &Preorder, max_level: i64) -> Option<Vec<i64>> {
    (1..=max_level).find_map(|l| {
        shell_points(coarse.n(), l)
            .into_iter()
            .flat_map(|u| {
                let neg = u.iter().map(|x| -x).collect();
                [u, neg]
            })
            .find(|u| {
                coarse.sign_of(u).expect("same n") == SignClass::Pos
                    && fine.sign_of(u).expect("same n") != SignClass::Pos
            })
    })
}

/// Distance straight from the definition: the first `k` at which the two
/// relations differ on some pair of points of `G_k`.
pub fn distance_by_pairs(p: &Preorder, q: &Preorder, m_max: u64) -> Distance {
    if p == q {
        return Distance::Zero;
    }
    for k in 1..=m_max {
        let pts: Vec<Vec<i64>> = box_points(p.n(), k as i64).collect();
        let differs = pts.iter().any(|u| {
            pts.iter()
                .any(|v| p.compare(u, v).expect("same n") != q.compare(u, v).expect("same n"))
        });
        if differs {
            return Distance::Exact(k);
        }
    }
    Distance::AtMost(m_max + 1)
}

/// Outcome of one property suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, cases: usize) -> Self {
        SuiteReport {
            name,
            cases,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "name": self.name,
            "cases": self.cases,
            "passed": self.passed(),
            "failures": self.failures,
        })
    }
}

pub const SUITES: [&str; 5] = ["axioms", "lattice", "metric", "action", "valuation"];

fn fields() -> [NumberField; 2] {
    [NumberField::rationals(), NumberField::sqrt2()]
}

fn pick_field(rng: &mut CheckRng) -> NumberField {
    fields()[rng.gen_range(0..2)].clone()
}

pub fn run_suite(name: &str, seed: u64, cases: usize) -> Option<SuiteReport> {
    let mut rng = rng(seed);
    Some(match name {
        "axioms" => axioms(&mut rng, cases),
        "lattice" => lattice(&mut rng, cases),
        "metric" => metric(&mut rng, cases),
        "action" => action(&mut rng, cases),
        "valuation" => valuation(&mut rng, cases),
        _ => return None,
    })
}

/// Runs one suite or, for `all`, every suite; `None` for an unknown name.
pub fn run(name: &str, seed: u64, cases: usize) -> Option<Vec<SuiteReport>> {
    if name == "all" {
        return Some(
            SUITES
                .iter()
                .map(|s| run_suite(s, seed, cases).expect("known suite"))
                .collect(),
        );
    }
    run_suite(name, seed, cases).map(|r| vec![r])
}

pub fn report_json(seed: u64, cases: usize, reports: &[SuiteReport]) -> Json {
    json!({
        "seed": seed,
        "cases": cases,
        "passed": reports.iter().all(SuiteReport::passed),
        "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
    })
}

fn axioms(rng: &mut CheckRng, cases: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("axioms", cases);
    for _ in 0..cases {
        let field = pick_field(rng);
        let n = rng.gen_range(1..=4);
        let rows = random_rows(rng, &field, n);
        let p = Preorder::from_rows(&field, &rows, n).expect("rows have length n");
        let label = p.label();
        let total: usize = p.type_of().iter().sum::<usize>() + p.degree();
        rep.check(total == n, || format!("{label}: type sum + degree = {total} != {n}"));
        rep.check(p.rank() + p.degree() <= n, || format!("{label}: rank + degree > n"));
        let again = Preorder::from_rows(&field, p.rows(), n).expect("canonical rows");
        rep.check(again == p, || format!("{label}: canonicalization not idempotent"));
        let level = if n <= 2 { 3 } else { 1 };
        for u in box_points(n, level) {
            let s = p.sign_of(&u).expect("length n");
            if s != raw_sign(&rows, &u) {
                rep.check(false, || format!("{label}: sign of {u:?} differs from raw rows"));
                break;
            }
            let neg: Vec<i64> = u.iter().map(|x| -x).collect();
            if p.sign_of(&neg).expect("length n") != s.negate() {
                rep.check(false, || format!("{label}: sign of -{u:?} is not negated"));
                break;
            }
        }
    }
    rep
}

fn lattice(rng: &mut CheckRng, cases: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("lattice", cases);
    for _ in 0..cases {
        let field = pick_field(rng);
        let n = rng.gen_range(1..=3);
        let p = random_preorder(rng, &field, n);
        let q = random_preorder(rng, &field, n);
        let (lp, lq) = (p.label(), q.label());
        for k in 0..=p.rank() {
            let t = truncate(&p, k).expect("k <= rank");
            rep.check(refines(&t, &p).expect("same space"), || {
                format!("{lp}: truncation {k} not refined by p")
            });
            let (head, tail, basis) = decompose(&p, k).expect("k <= rank");
            let back = compose(&head, &tail, &basis).expect("decomposition basis");
            rep.check(back == p, || format!("{lp}: decompose/compose at {k} changed p"));
        }
        let m = meet(&p, &q).expect("same space");
        rep.check(m == meet(&q, &p).expect("same space"), || format!("meet({lp},{lq}) not symmetric"));
        rep.check(
            refines(&m, &p).expect("same space") && refines(&m, &q).expect("same space"),
            || format!("meet({lp},{lq}) is not below both"),
        );
        let up = m.rank() + 1;
        rep.check(
            up > p.rank() || up > q.rank() || truncate(&p, up).ok() != truncate(&q, up).ok(),
            || format!("meet({lp},{lq}) is not greatest"),
        );
        if n == 2 {
            let fast = refines(&p, &q).expect("same space");
            if fast {
                rep.check(refines_on_box(&p, &q, 3), || {
                    format!("refines({lp},{lq}) but the box test finds a counterexample")
                });
            } else {
                rep.check(refinement_counterexample(&p, &q, 64).is_some(), || {
                    format!("refines({lp},{lq}) = false without a counterexample point")
                });
            }
        }
    }
    rep
}

fn metric(rng: &mut CheckRng, cases: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("metric", cases);
    let m_max = 6;
    for _ in 0..cases {
        let field = pick_field(rng);
        let n = rng.gen_range(1..=3);
        let a = random_preorder(rng, &field, n);
        let mut b = random_preorder(rng, &field, n);
        if rng.gen_bool(0.3) {
            // near neighbours share a prefix
            b = compose_prefix(rng, &a, &b);
        }
        let c = random_preorder(rng, &field, n);
        let d = |x: &Preorder, y: &Preorder| distance(x, y, m_max).expect("same space");
        let (ab, bc, ac) = (d(&a, &b), d(&b, &c), d(&a, &c));
        let bound = ab.upper_bound().max(bc.upper_bound());
        rep.check(ac.upper_bound() <= bound, || {
            format!("d({},{}) = {ac} exceeds max({ab}, {bc})", a.label(), c.label())
        });
        rep.check(d(&b, &a) == ab, || format!("d not symmetric on {}, {}", a.label(), b.label()));
        rep.check((ab == Distance::Zero) == (a == b), || format!("d = 0 iff equal fails on {}", a.label()));
        if n <= 2 {
            let oracle = distance_by_pairs(&a, &b, 4);
            let fast = d(&a, &b);
            let fast4 = distance(&a, &b, 4).expect("same space");
            rep.check(fast4 == oracle, || {
                format!("d({},{}) = {fast} but pairwise oracle gives {oracle}", a.label(), b.label())
            });
        }
    }
    rep
}

/// `b` with its leading rows replaced by those of `a`.
fn compose_prefix(rng: &mut CheckRng, a: &Preorder, b: &Preorder) -> Preorder {
    let k = rng.gen_range(0..=a.rank());
    let mut rows = a.rows()[..k].to_vec();
    rows.extend(b.rows().iter().cloned());
    Preorder::from_rows(a.field(), &rows, a.n()).expect("rows have length n")
}

fn action(rng: &mut CheckRng, cases: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("action", cases);
    for case in 0..cases {
        let field = pick_field(rng);
        let n = rng.gen_range(1..=3);
        let p = random_preorder(rng, &field, n);
        let lp = p.label();
        let phi = if rng.gen_bool(0.5) { random_unimodular(rng, n) } else { random_invertible(rng, n) };
        let psi = random_invertible(rng, n);
        let img = apply(&phi, &p).expect("dims match");
        rep.check(
            img.type_of() == p.type_of() && img.rank() == p.rank() && img.degree() == p.degree(),
            || format!("{lp}: invariants changed by {phi:?}"),
        );
        let lhs = apply(&phi.then_after(&psi), &p).expect("dims match");
        let rhs = apply(&psi, &img).expect("dims match");
        rep.check(lhs == rhs, || format!("{lp}: composition law fails for {phi:?}, {psi:?}"));
        rep.check(
            apply(&Automorphism::identity(n), &p).expect("dims match") == p,
            || format!("{lp}: identity moves p"),
        );
        let lambda = Q::new(rng.gen_range(1i64..=5).into(), rng.gen_range(1i64..=3).into());
        rep.check(
            is_stabilizer(&Automorphism::scalar(n, lambda), &p).expect("dims match"),
            || format!("{lp}: positive scalar moves p"),
        );
        let k = rng.gen_range(0..=p.rank());
        let t = truncate(&p, k).expect("k <= rank");
        rep.check(
            refines(&apply(&phi, &t).expect("dims"), &img).expect("same space"),
            || format!("{lp}: action not monotone"),
        );
        for g in [&phi, &psi] {
            let fast = is_stabilizer(g, &p).expect("dims match");
            let via = stabilizes_via_quotient(g, &p).expect("dims match");
            rep.check(fast == via, || format!("{lp}: stabilizer tests disagree on {g:?}"));
            if is_positive_scalar_on_quotient(g, &p) {
                rep.check(fast, || format!("{lp}: scalar on quotient but {g:?} moves p"));
            }
        }
        if case % 4 == 0 {
            match orbit_witness(&p, &img) {
                Ok(w) => rep.check(apply(&w, &p).expect("dims") == img, || {
                    format!("{lp}: orbit witness does not verify")
                }),
                Err(e) => rep.check(false, || format!("{lp}: orbit_witness to its image failed: {e}")),
            }
        }
    }
    rep
}

fn valuation(rng: &mut CheckRng, cases: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("valuation", cases);
    for case in 0..cases {
        let field = pick_field(rng);
        let coeffs = if case % 2 == 0 { CoefficientField::Prime(5) } else { CoefficientField::Rational };
        let n = 3;
        let p = random_preorder(rng, &field, n);
        let lp = p.label();
        let f = random_polynomial(rng, coeffs, n, 4);
        let g = random_polynomial(rng, coeffs, n, 4);
        let (vf, vg) = (valuate(&p, &f).expect("dims"), valuate(&p, &g).expect("dims"));
        let fg = f.mul(&g).expect("same ring");
        let vfg = valuate(&p, &fg).expect("dims");
        rep.check(vfg == vf.add(&vg).expect("same field"), || {
            format!("{lp}: nu(fg) = {} but nu(f) + nu(g) = {}", vfg.to_compact(), vf.add(&vg).unwrap().to_compact())
        });
        let sum = f.add(&g).expect("same ring");
        let vs = valuate(&p, &sum).expect("dims");
        let lo = if vf <= vg { vf.clone() } else { vg.clone() };
        rep.check(vs >= lo, || format!("{lp}: nu(f+g) below the minimum"));
        if vf.partial_cmp(&vg) != Some(Ordering::Equal) {
            rep.check(vs == lo, || format!("{lp}: nu(f+g) not the minimum of distinct values"));
        }
        let inf = initial_form(&p, &fg).expect("nonzero");
        let prod = initial_form(&p, &f)
            .expect("nonzero")
            .mul(&initial_form(&p, &g).expect("nonzero"))
            .expect("same ring");
        rep.check(inf == prod, || format!("{lp}: initial forms do not multiply"));
        let k = rng.gen_range(0..=p.rank());
        let report = check_composition(&p, k, &f).expect("k <= rank, f != 0");
        rep.check(report.passed, || format!("{lp}: composition fails at k = {k} on {f}"));
        let t = Preorder::trivial(&field, n);
        rep.check(valuate(&t, &f).expect("dims") == Value::Finite(Vec::new()), || {
            "trivial preorder gives a nonzero value".into()
        });
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_runs() {
        for name in SUITES {
            let rep = run_suite(name, 7, 15).unwrap();
            assert!(rep.passed(), "{name}: {:?}", rep.failures);
        }
        assert!(run("bogus", 1, 1).is_none());
    }

    #[test]
    fn generators_are_seeded() {
        let f = NumberField::sqrt2();
        let a = random_preorder(&mut rng(3), &f, 3);
        let b = random_preorder(&mut rng(3), &f, 3);
        assert_eq!(a, b);
        assert!(random_unimodular(&mut rng(4), 3).is_integral_unimodular());
    }
}
