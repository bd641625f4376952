use proptest::prelude::*;
use rand::RngCore;

use crate::action::{
    apply, is_positive_scalar_on_quotient, is_stabilizer, stabilizes_via_quotient, Automorphism,
};
use crate::checks::{
    random_element, random_invertible, random_polynomial, random_preorder, random_rows, rng, CheckRng,
};
use crate::lattice::{compose, decompose, meet, quotient, refines, truncate};
use crate::preorder::{box_points, raw_sign};
use crate::rational::Q;
use crate::topology::{distance, fingerprint, Distance};
use crate::valuation::{initial_form, valuate, CoefficientField};
use crate::{FieldVector, NumberField, Preorder, RationalSubspace};

fn field(which: bool) -> NumberField {
    if which {
        NumberField::sqrt2()
    } else {
        NumberField::rationals()
    }
}

fn sample(seed: u64, sqrt2: bool, n: usize) -> (CheckRng, NumberField, Preorder) {
    let mut g = rng(seed);
    let f = field(sqrt2);
    let p = random_preorder(&mut g, &f, n);
    (g, f, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_arithmetic_is_a_ring(seed: u64) {
        let mut g = rng(seed);
        let f = NumberField::sqrt2();
        let (a, b, c) = (random_element(&mut g, &f, 5), random_element(&mut g, &f, 5), random_element(&mut g, &f, 5));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&a.checked_div(&b).unwrap() * &b, a.clone());
        }
        let approx = a.approx();
        if approx.abs() > 1e-9 {
            prop_assert_eq!(a.sign(), approx.partial_cmp(&0.0).unwrap());
        }
    }

    #[test]
    fn signs_multiply(seed: u64) {
        let mut g = rng(seed);
        let f = NumberField::sqrt2();
        let (a, b) = (random_element(&mut g, &f, 7), random_element(&mut g, &f, 7));
        let expected = match (a.sign(), b.sign()) {
            (x, y) if x.is_eq() || y.is_eq() => std::cmp::Ordering::Equal,
            (x, y) if x == y => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Less,
        };
        prop_assert_eq!((&a * &b).sign(), expected);
    }

    #[test]
    fn echelon_basis_is_canonical(seed: u64, n in 1usize..5) {
        let mut g = rng(seed);
        let p = random_preorder(&mut g, &NumberField::rationals(), n);
        let w = p.residue_group();
        // a scaled, reversed spanning set gives the same subspace
        let alt: Vec<Vec<Q>> = w.basis().iter().rev()
            .map(|b| b.iter().map(|x| x * Q::from_integer(3.into())).collect())
            .collect();
        prop_assert_eq!(&RationalSubspace::span(n, &alt), w);
        let other = random_preorder(&mut g, &NumberField::rationals(), n);
        let v = other.residue_group();
        let dims = w.sum(v).unwrap().dim() + w.intersect(v).unwrap().dim();
        prop_assert_eq!(dims, w.dim() + v.dim());
    }

    #[test]
    fn canonical_form_matches_raw_rows(seed: u64, sqrt2: bool, n in 1usize..4) {
        let mut g = rng(seed);
        let f = field(sqrt2);
        let rows = random_rows(&mut g, &f, n);
        let p = Preorder::from_rows(&f, &rows, n).unwrap();
        for u in box_points(n, 2) {
            prop_assert_eq!(p.sign_of(&u).unwrap(), raw_sign(&rows, &u));
            let neg: Vec<i64> = u.iter().map(|x| -x).collect();
            prop_assert_eq!(p.sign_of(&neg).unwrap(), p.sign_of(&u).unwrap().negate());
        }
        prop_assert_eq!(Preorder::from_rows(&f, p.rows(), n).unwrap(), p.clone());
        prop_assert_eq!(p.type_of().iter().sum::<usize>() + p.degree(), n);
    }

    #[test]
    fn row_operations_preserve_the_preorder(seed: u64, sqrt2: bool, n in 2usize..4) {
        let mut g = rng(seed);
        let f = field(sqrt2);
        let rows = random_rows(&mut g, &f, n);
        prop_assume!(rows.len() >= 2);
        let p = Preorder::from_rows(&f, &rows, n).unwrap();
        let c = random_element(&mut g, &f, 3);
        let mut changed = rows.clone();
        changed[1] = rows[1].add(&rows[0].scale(&c)).unwrap();
        let positive = f.from_rational(Q::new(5.into(), 2.into()));
        changed[0] = rows[0].scale(&positive);
        prop_assert_eq!(Preorder::from_rows(&f, &changed, n).unwrap(), p);
    }

    #[test]
    fn refinement_is_a_partial_order(seed: u64, sqrt2: bool, n in 1usize..4) {
        let (mut g, f, p) = sample(seed, sqrt2, n);
        let q = random_preorder(&mut g, &f, n);
        prop_assert!(refines(&p, &p).unwrap());
        if refines(&p, &q).unwrap() && refines(&q, &p).unwrap() {
            prop_assert_eq!(&p, &q);
        }
        let m = meet(&p, &q).unwrap();
        prop_assert!(refines(&m, &p).unwrap() && refines(&m, &q).unwrap());
        prop_assert_eq!(meet(&m, &p).unwrap(), m.clone());
        for k in 0..=p.rank() {
            let t = truncate(&p, k).unwrap();
            prop_assert!(refines(&t, &p).unwrap());
            prop_assert_eq!(meet(&t, &p).unwrap(), t.clone());
        }
    }

    #[test]
    fn decomposition_round_trips(seed: u64, sqrt2: bool, n in 1usize..5) {
        let (mut g, _, p) = sample(seed, sqrt2, n);
        let k = if p.rank() == 0 { 0 } else { (g.next_u32() as usize) % (p.rank() + 1) };
        let (head, tail, basis) = decompose(&p, k).unwrap();
        prop_assert_eq!(head.rank(), k);
        prop_assert_eq!(tail.rank(), p.rank() - k);
        prop_assert_eq!(compose(&head, &tail, &basis).unwrap(), p.clone());
        let q = quotient(&p, p.residue_group()).unwrap();
        prop_assert_eq!(q.degree(), 0);
        prop_assert_eq!(q.rank(), p.rank());
    }

    #[test]
    fn distance_is_an_ultrametric(seed: u64, sqrt2: bool, n in 1usize..4) {
        let (mut g, f, a) = sample(seed, sqrt2, n);
        let b = random_preorder(&mut g, &f, n);
        let c = random_preorder(&mut g, &f, n);
        let d = |x: &Preorder, y: &Preorder| distance(x, y, 5).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), Distance::Zero);
        prop_assert!(d(&a, &c).upper_bound() <= d(&a, &b).upper_bound().max(d(&b, &c).upper_bound()));
        prop_assert_eq!(fingerprint(&a, 3).restrict(2), fingerprint(&a, 2));
    }

    #[test]
    fn action_laws(seed: u64, sqrt2: bool, n in 1usize..4) {
        let (mut g, _, p) = sample(seed, sqrt2, n);
        let phi = random_invertible(&mut g, n);
        let psi = random_invertible(&mut g, n);
        let img = apply(&phi, &p).unwrap();
        prop_assert_eq!(apply(&phi.then_after(&psi), &p).unwrap(), apply(&psi, &img).unwrap());
        prop_assert_eq!(img.type_of(), p.type_of());
        for k in 0..=p.rank() {
            let t = truncate(&p, k).unwrap();
            prop_assert!(refines(&apply(&phi, &t).unwrap(), &img).unwrap());
        }
        for u in box_points(n, 2) {
            let uq: Vec<Q> = u.iter().map(|&x| Q::from_integer(x.into())).collect();
            prop_assert_eq!(img.sign_of(&u).unwrap(), p.sign_of_rational(&phi.apply_vec(&uq)).unwrap());
        }
        let fast = is_stabilizer(&phi, &p).unwrap();
        prop_assert_eq!(fast, stabilizes_via_quotient(&phi, &p).unwrap());
        if is_positive_scalar_on_quotient(&phi, &p) {
            prop_assert!(fast);
        }
    }

    #[test]
    fn valuations_multiply(seed: u64, sqrt2: bool, prime: bool) {
        let (mut g, f, p) = sample(seed, sqrt2, 3);
        let coeffs = if prime { CoefficientField::Prime(5) } else { CoefficientField::Rational };
        let a = random_polynomial(&mut g, coeffs, 3, 4);
        let b = random_polynomial(&mut g, coeffs, 3, 4);
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(valuate(&p, &ab).unwrap(), valuate(&p, &a).unwrap().add(&valuate(&p, &b).unwrap()).unwrap());
        prop_assert_eq!(
            initial_form(&p, &ab).unwrap(),
            initial_form(&p, &a).unwrap().mul(&initial_form(&p, &b).unwrap()).unwrap()
        );
        let t = Preorder::trivial(&f, 3);
        prop_assert!(valuate(&t, &a).unwrap().is_zero());
    }
}

#[test]
fn irrational_rows_do_not_split() {
    let f = NumberField::sqrt2();
    let row = FieldVector::new(&f, vec![f.one(), f.generator(), f.zero()]).unwrap();
    let p = Preorder::from_rows(&f, &[row], 3).unwrap();
    assert_eq!(p.type_of(), vec![2]);
    assert_eq!(p.degree(), 1);
}

#[test]
fn stabilizers_beyond_scalars() {
    let k = NumberField::sqrt2();
    // multiplication by the unit 1 + a, written on the basis (1, a)
    let p = Preorder::from_compact_rows(&k, &[vec!["1", "a"]], 2).unwrap();
    let unit = Automorphism::from_ints(&[vec![1, 2], vec![1, 1]]).unwrap();
    assert!(is_stabilizer(&unit, &p).unwrap());
    assert!(stabilizes_via_quotient(&unit, &p).unwrap());
    assert!(!is_positive_scalar_on_quotient(&unit, &p));
    let flip = Automorphism::from_ints(&[vec![-1, -2], vec![-1, -1]]).unwrap();
    assert!(!is_stabilizer(&flip, &p).unwrap());
    assert!(!stabilizes_via_quotient(&flip, &p).unwrap());
    // a shear inside the residue group of a rank-one preorder on Q^3
    let r = NumberField::rationals();
    let q = Preorder::from_int_rows(&r, &[vec![1, 0, 0]], 3).unwrap();
    let shear = Automorphism::from_ints(&[vec![2, 0, 0], vec![5, 1, 3], vec![-1, 0, 1]]).unwrap();
    assert!(is_stabilizer(&shear, &q).unwrap());
    assert!(stabilizes_via_quotient(&shear, &q).unwrap());
    assert!(is_positive_scalar_on_quotient(&shear, &q));
}
