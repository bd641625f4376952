//! Patch-topology computations: box fingerprints, the ultrametric, isolated
//! points, neighbourhood witnesses, sphere projection and finite fragments of
//! the refinement tree.
//!
//! The filtration of `Z^n` is fixed to the max-norm boxes
//! `G_k = {-k, ..., k}^n`, so the height of `u` is its max-norm. Two preorders
//! agree on `G_k` as relations iff their sign patterns agree on `G_2k`, since
//! `G_2k` is exactly the difference set of `G_k`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::truncate;
use crate::linalg::FieldVector;
use crate::preorder::{box_points, Preorder, SignClass};
use crate::rational::Q;
use crate::realfield::NumberField;

/// `true` when the first nonzero coordinate is positive. Signs on the other
/// half of a box follow by negation.
pub fn in_positive_half(u: &[i64]) -> bool {
    u.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Points of max-norm exactly `level`, positive half only, in lexicographic order.
pub fn shell_points(n: usize, level: i64) -> Vec<Vec<i64>> {
    if level == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<i64>> = box_points(n, level)
        .filter(|u| in_positive_half(u) && u.iter().any(|x| x.abs() == level))
        .collect();
    out.sort();
    out
}

/// Signs of a preorder on the box `G_level`, stored for the positive half.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    level: i64,
    n: usize,
    signs: BTreeMap<Vec<i64>, SignClass>,
}

impl Fingerprint {
    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sign of any point in the box, or `None` outside it.
    pub fn get(&self, u: &[i64]) -> Option<SignClass> {
        if u.len() != self.n || u.iter().any(|x| x.abs() > self.level) {
            return None;
        }
        if u.iter().all(|&x| x == 0) {
            return Some(SignClass::Zero);
        }
        if in_positive_half(u) {
            self.signs.get(u).copied()
        } else {
            let neg: Vec<i64> = u.iter().map(|x| -x).collect();
            self.signs.get(&neg).map(|s| s.negate())
        }
    }

    /// Stored half-box entries in lexicographic order.
    pub fn half_entries(&self) -> impl Iterator<Item = (&Vec<i64>, &SignClass)> {
        self.signs.iter()
    }

    /// Every point of the box with its sign, in lexicographic order.
    pub fn entries(&self) -> Vec<(Vec<i64>, SignClass)> {
        box_points(self.n, self.level)
            .map(|u| {
                let s = self.get(&u).expect("point in box");
                (u, s)
            })
            .collect()
    }

    /// Fingerprint at a lower level obtained by restriction.
    pub fn restrict(&self, level: i64) -> Fingerprint {
        assert!(level <= self.level, "can only restrict downwards");
        Fingerprint {
            level,
            n: self.n,
            signs: self
                .signs
                .iter()
                .filter(|(u, _)| u.iter().all(|x| x.abs() <= level))
                .map(|(u, s)| (u.clone(), *s))
                .collect(),
        }
    }
}

pub fn fingerprint(p: &Preorder, level: i64) -> Fingerprint {
    let signs = box_points(p.n(), level)
        .filter(|u| in_positive_half(u))
        .map(|u| {
            let s = p.sign_unchecked(&u);
            (u, s)
        })
        .collect();
    Fingerprint {
        level,
        n: p.n(),
        signs,
    }
}

/// `true` when the two preorders classify every point of `G_level` alike.
pub fn fingerprints_agree(p: &Preorder, q: &Preorder, level: i64) -> bool {
    (1..=level).all(|l| {
        shell_points(p.n(), l)
            .iter()
            .all(|u| p.sign_unchecked(u) == q.sign_unchecked(u))
    })
}

/// Smallest max-norm of a point classified differently, searched up to `max_level`.
pub fn first_mismatch(p: &Preorder, q: &Preorder, max_level: i64) -> Option<i64> {
    (1..=max_level).find(|&l| {
        shell_points(p.n(), l)
            .iter()
            .any(|u| p.sign_unchecked(u) != q.sign_unchecked(u))
    })
}

/// Value of the ultrametric `d`, as far as it is decided by boxes up to `G_m_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Zero,
    /// Exactly `1/m`: the restrictions agree on `G_(m-1)` but not on `G_m`.
    Exact(u64),
    /// At most `1/m`: no disagreement found on `G_(m-1)`.
    AtMost(u64),
}

impl Distance {
    /// Upper bound as the rational `1/m` (or 0).
    pub fn upper_bound(&self) -> Q {
        match *self {
            Distance::Zero => Q::zero(),
            Distance::Exact(m) | Distance::AtMost(m) => {
                Q::new(BigInt::one(), BigInt::from(m))
            }
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::Exact(m) => write!(f, "1/{m}"),
            Distance::AtMost(m) => write!(f, "≤1/{m}"),
        }
    }
}

pub fn distance(p: &Preorder, q: &Preorder, m_max: u64) -> Result<Distance> {
    p.same_space(q)?;
    if p == q {
        return Ok(Distance::Zero);
    }
    // pairs of G_m differ iff some point of G_2m is classified differently
    match first_mismatch(p, q, 2 * m_max as i64) {
        Some(level) => Ok(Distance::Exact((level as u64).div_ceil(2))),
        None => Ok(Distance::AtMost(m_max + 1)),
    }
}

/// Isolated points of the patch topology are exactly those of degree `>= n - 1`.
pub fn is_isolated(p: &Preorder) -> bool {
    p.degree() + 1 >= p.n()
}

/// Budget for the neighbourhood witness search.
#[derive(Clone, Copy, Debug)]
pub struct WitnessBudget {
    /// Largest `N` tried for the step `1/N`, as a power of two.
    pub max_log2_denominator: u32,
    pub max_directions: usize,
}

impl Default for WitnessBudget {
    fn default() -> Self {
        WitnessBudget {
            max_log2_denominator: 40,
            max_directions: 8,
        }
    }
}

/// Perturbation directions for the head row, in a fixed order.
fn directions(p: &Preorder, limit: usize) -> Vec<FieldVector> {
    let field = p.field();
    let mut out = Vec::new();
    let d1 = p.type_of()[0];
    if d1 >= 2 {
        let perp = p.flag()[1].orthogonal_complement();
        let basis = perp.basis();
        for b in basis {
            out.push(FieldVector::from_rationals(field, b));
        }
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let sum: Vec<Q> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect();
                let diff: Vec<Q> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a - b).collect();
                out.push(FieldVector::from_rationals(field, &sum));
                out.push(FieldVector::from_rationals(field, &diff));
            }
        }
    }
    if p.rank() >= 2 {
        out.insert(out.len().min(d1.max(1)), p.rows()[1].clone());
    }
    out.truncate(limit);
    out
}

/// Lazily produces verified neighbours of `p` in a deterministic order.
struct WitnessSearch<'a> {
    p: &'a Preorder,
    m: u64,
    same_type: bool,
    budget: WitnessBudget,
    dirs: Vec<FieldVector>,
    dir: usize,
    log2: u32,
}

impl<'a> WitnessSearch<'a> {
    fn new(p: &'a Preorder, m: u64, same_type: bool, budget: WitnessBudget) -> Result<Self> {
        if is_isolated(p) {
            return Err(Error::Isolated);
        }
        Ok(WitnessSearch {
            p,
            m,
            same_type,
            budget,
            dirs: directions(p, budget.max_directions),
            dir: 0,
            log2: 0,
        })
    }

    fn candidate(&self, z: &FieldVector, log2: u32) -> Result<Preorder> {
        let p = self.p;
        let eps = Q::new(BigInt::one(), BigInt::one() << log2);
        let step = z.scale(&p.field().from_rational(eps));
        let mut rows = p.rows().to_vec();
        rows[0] = rows[0].add(&step)?;
        Preorder::from_rows(p.field(), &rows, p.n())
    }

    fn verified(&self, c: &Preorder) -> bool {
        let p = self.p;
        if c == p {
            return false;
        }
        if self.same_type && c.type_of() != p.type_of() {
            return false;
        }
        fingerprints_agree(p, c, 2 * self.m as i64)
    }
}

impl Iterator for WitnessSearch<'_> {
    type Item = Preorder;

    fn next(&mut self) -> Option<Preorder> {
        while self.dir < self.dirs.len() {
            while self.log2 <= self.budget.max_log2_denominator {
                let log2 = self.log2;
                self.log2 += 1;
                let Ok(c) = self.candidate(&self.dirs[self.dir], log2) else {
                    continue;
                };
                if self.verified(&c) {
                    return Some(c);
                }
            }
            self.dir += 1;
            self.log2 = 0;
        }
        None
    }
}

/// A preorder distinct from `p` with the same signs on `G_2m`, hence within
/// distance `1/(m+1)`; optionally of the same type as `p`.
pub fn perturb_in_ball(p: &Preorder, m: u64, want_same_type: bool) -> Result<Preorder> {
    perturb_in_ball_with(p, m, want_same_type, WitnessBudget::default())
}

pub fn perturb_in_ball_with(
    p: &Preorder,
    m: u64,
    want_same_type: bool,
    budget: WitnessBudget,
) -> Result<Preorder> {
    WitnessSearch::new(p, m, want_same_type, budget)?
        .next()
        .ok_or_else(|| Error::WitnessNotFound(format!("no neighbour of {} within budget", p.label())))
}

/// `count` pairwise distinct same-type neighbours of `p` agreeing on `G_2m`.
pub fn same_type_neighbors(p: &Preorder, m: u64, count: usize) -> Result<Vec<Preorder>> {
    let mut out: Vec<Preorder> = Vec::with_capacity(count);
    for c in WitnessSearch::new(p, m, true, WitnessBudget::default())? {
        if !out.contains(&c) {
            out.push(c);
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(Error::WitnessNotFound(format!(
        "found {} of {count} neighbours of {}",
        out.len(),
        p.label()
    )))
}

/// Projective representative of the sphere point of the rank-one coarsening.
pub fn sphere_point(p: &Preorder) -> Result<FieldVector> {
    p.rows().first().cloned().ok_or(Error::TrivialPreorder)
}

/// The rank-one preorder refined by `p`.
pub fn sphere_projection(p: &Preorder) -> Result<Preorder> {
    if p.is_trivial() {
        return Err(Error::TrivialPreorder);
    }
    truncate(p, 1)
}

/// A finite piece of the refinement tree: nodes with cover edges among them.
#[derive(Clone, Debug)]
pub struct FragmentGraph {
    pub nodes: Vec<Preorder>,
    /// `(parent, child)` pairs: `child` covers `parent` within the node set.
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl FragmentGraph {
    /// Builds the cover relation on an arbitrary set of preorders containing
    /// the trivial one. Nodes are ordered by rank, then by first appearance.
    pub fn from_nodes(field: &NumberField, n: usize, found: Vec<Preorder>) -> Result<Self> {
        let mut nodes: Vec<Preorder> = vec![Preorder::trivial(field, n)];
        for p in found {
            if p.field() != field {
                return Err(Error::FieldMismatch);
            }
            if !nodes.contains(&p) {
                nodes.push(p);
            }
        }
        // stable sort keeps discovery order within a rank
        nodes.sort_by_key(Preorder::rank);
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, p)| (p.label(), i))
            .collect();
        let mut edges = Vec::new();
        for (j, p) in nodes.iter().enumerate().skip(1) {
            let parent = (0..p.rank()).rev().find_map(|k| {
                let t = truncate(p, k).expect("k < rank");
                index.get(&t.label()).copied()
            });
            if let Some(i) = parent {
                edges.push((i, j));
            }
        }
        edges.sort();
        Ok(FragmentGraph {
            nodes,
            edges,
            root: 0,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph zr {\n  node [shape=box];\n");
        for (i, p) in self.nodes.iter().enumerate() {
            let ty: Vec<String> = p.type_of().iter().map(|d| d.to_string()).collect();
            out.push_str(&format!(
                "  n{i} [label=\"{}\\nrank {}, degree {}, type ({})\"];\n",
                p.label(),
                p.rank(),
                p.degree(),
                ty.join(",")
            ));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Every preorder defined by an ordered tuple of at most `max_rank` distinct
/// candidate rows, with the cover edges between them.
pub fn enumerate_fragment(
    field: &NumberField,
    candidates: &[FieldVector],
    n: usize,
    max_rank: usize,
) -> Result<FragmentGraph> {
    if candidates.iter().any(|c| c.field() != field) {
        return Err(Error::FieldMismatch);
    }
    if let Some(c) = candidates.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let mut found = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_rank.min(n) {
        let mut next = Vec::new();
        for tuple in &frontier {
            for c in 0..candidates.len() {
                if tuple.contains(&c) {
                    continue;
                }
                let mut t = tuple.clone();
                t.push(c);
                let rows: Vec<FieldVector> = t.iter().map(|&i| candidates[i].clone()).collect();
                let p = Preorder::from_rows(field, &rows, n)?;
                if p.rank() == t.len() {
                    // shorter-rank results are reached through shorter tuples
                    if seen.insert(p.label(), ()).is_none() {
                        found.push(p);
                    }
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    FragmentGraph::from_nodes(field, n, found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> NumberField {
        NumberField::rationals()
    }

    fn lex2(f: &NumberField) -> Preorder {
        Preorder::from_int_rows(f, &[vec![1, 0], vec![0, 1]], 2).unwrap()
    }

    #[test]
    fn fingerprints() {
        let f = r();
        let t = Preorder::trivial(&f, 2);
        assert!(fingerprint(&t, 2).entries().iter().all(|(_, s)| *s == SignClass::Zero));
        let p = Preorder::from_int_rows(&f, &[vec![1, 0]], 2).unwrap();
        let fp = fingerprint(&p, 1);
        assert_eq!(fp.get(&[1, 0]), Some(SignClass::Pos));
        assert_eq!(fp.get(&[-1, 0]), Some(SignClass::Neg));
        assert_eq!(fp.get(&[0, 1]), Some(SignClass::Zero));
        assert_eq!(fp.get(&[0, -1]), Some(SignClass::Zero));
        assert_eq!(fp.get(&[2, 0]), None);
        let k = NumberField::sqrt2();
        let p = Preorder::from_compact_rows(&k, &[vec!["1", "a"]], 2).unwrap();
        assert_eq!(fingerprint(&p, 1).get(&[1, -1]), Some(SignClass::Neg));
    }

    #[test]
    fn restriction_matches_lower_level() {
        let k = NumberField::sqrt2();
        let p = Preorder::from_compact_rows(&k, &[vec!["1", "a", "-1/3"]], 3).unwrap();
        assert_eq!(fingerprint(&p, 3).restrict(1), fingerprint(&p, 1));
    }

    #[test]
    fn distances() {
        let f = r();
        let p = lex2(&f);
        assert_eq!(distance(&p, &p, 3).unwrap(), Distance::Zero);
        let a = Preorder::from_int_rows(&f, &[vec![1, 0]], 2).unwrap();
        let b = Preorder::from_int_rows(&f, &[vec![-1, 0]], 2).unwrap();
        assert_eq!(distance(&a, &b, 4).unwrap(), Distance::Exact(1));
        assert_eq!(Distance::AtMost(7).to_string(), "≤1/7");
    }

    #[test]
    fn isolation() {
        let f = r();
        assert!(is_isolated(&Preorder::trivial(&f, 2)));
        assert!(is_isolated(&Preorder::from_int_rows(&f, &[vec![1, 0]], 2).unwrap()));
        let k = NumberField::sqrt2();
        let p = Preorder::from_compact_rows(&k, &[vec!["1", "a"]], 2).unwrap();
        assert!(!is_isolated(&p));
        assert_eq!(
            perturb_in_ball(&Preorder::from_int_rows(&f, &[vec![1, 0]], 2).unwrap(), 3, true),
            Err(Error::Isolated)
        );
    }

    #[test]
    fn perturbation_of_irrational_line() {
        let k = NumberField::sqrt2();
        let p = Preorder::from_compact_rows(&k, &[vec!["1", "a"]], 2).unwrap();
        let w = perturb_in_ball(&p, 5, true).unwrap();
        assert_ne!(w, p);
        assert_eq!((w.rank(), w.degree()), (1, 0));
        assert_eq!(fingerprint(&w, 10), fingerprint(&p, 10));
        let ns = same_type_neighbors(&p, 3, 1).unwrap();
        assert_eq!(ns, vec![perturb_in_ball(&p, 3, true).unwrap()]);
    }

    #[test]
    fn perturbation_of_lex_in_three_dims() {
        let f = r();
        let p = Preorder::from_int_rows(&f, &[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap();
        let w = perturb_in_ball(&p, 3, true).unwrap();
        assert_eq!(w.type_of(), vec![1, 1]);
        assert_eq!(fingerprint(&w, 6), fingerprint(&p, 6));
    }

    #[test]
    fn sphere() {
        let f = r();
        assert_eq!(
            sphere_point(&lex2(&f)).unwrap(),
            FieldVector::from_ints(&f, &[1, 0])
        );
        let p = Preorder::from_int_rows(&f, &[vec![3, 4]], 2).unwrap();
        let expected = FieldVector::from_rationals(&f, &[Q::one(), Q::new(4.into(), 3.into())]);
        assert_eq!(sphere_point(&p).unwrap(), expected);
        assert_eq!(sphere_point(&Preorder::trivial(&f, 2)), Err(Error::TrivialPreorder));
    }

    #[test]
    fn fragments() {
        let f = r();
        let c1 = vec![FieldVector::from_ints(&f, &[1]), FieldVector::from_ints(&f, &[-1])];
        let g = enumerate_fragment(&f, &c1, 1, 1).unwrap();
        assert_eq!((g.nodes.len(), g.edges.len()), (3, 2));
        assert!(g.edges.iter().all(|&(a, _)| a == g.root));
        let c2: Vec<FieldVector> = [[1, 0], [-1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|v| FieldVector::from_ints(&f, v))
            .collect();
        let g = enumerate_fragment(&f, &c2, 2, 2).unwrap();
        assert_eq!(g.nodes.len(), 13);
        assert_eq!(g.edges.len(), 12);
        let g = enumerate_fragment(&f, &[], 2, 2).unwrap();
        assert_eq!((g.nodes.len(), g.edges.len()), (1, 0));
        let dot = g.to_dot();
        assert!(dot.contains("n0 [label=\"lex[]"));
        assert!(!dot.contains("->"));
    }
}
