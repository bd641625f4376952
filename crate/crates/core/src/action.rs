//! The action of `GL_n(Q)` on preorders: `u <=_phi v` iff `phi(u) <= phi(v)`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{complement_coordinates, quotient};
use crate::linalg::{determinant, mat_mul, mat_vec, nullspace, transpose};
use crate::preorder::Preorder;
use crate::rational::{fmt_q, Q};
use crate::realfield::FieldElement;

/// An invertible rational `n x n` matrix acting on column vectors.
#[derive(Clone, PartialEq, Eq)]
pub struct Automorphism {
    matrix: Vec<Vec<Q>>,
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(fmt_q).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl Automorphism {
    pub fn new(matrix: Vec<Vec<Q>>) -> Result<Self> {
        let n = matrix.len();
        if let Some(r) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        if determinant(&matrix).is_zero() {
            return Err(Error::Singular);
        }
        Ok(Automorphism { matrix })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Q::one())
    }

    pub fn scalar(n: usize, lambda: Q) -> Self {
        assert!(!lambda.is_zero(), "scalar automorphism needs lambda != 0");
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { lambda.clone() } else { Q::zero() })
                    .collect()
            })
            .collect();
        Automorphism { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<Q>] {
        &self.matrix
    }

    /// Matrix product `self * other`, i.e. `u -> self(other(u))`.
    pub fn then_after(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            matrix: mat_mul(&self.matrix, &other.matrix),
        }
    }

    pub fn apply_vec(&self, u: &[Q]) -> Vec<Q> {
        mat_vec(&self.matrix, u)
    }

    pub fn is_integral_unimodular(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_integer())
            && determinant(&self.matrix).abs().is_one()
    }
}

/// The preorder `u <= v` iff `phi(u) <=_p phi(v)`; its rows are `phi^T r_k`.
pub fn apply(phi: &Automorphism, p: &Preorder) -> Result<Preorder> {
    if phi.dim() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: phi.dim(),
        });
    }
    let t = transpose(&phi.matrix);
    let rows: Vec<_> = p.rows().iter().map(|r| r.apply_rational(&t)).collect();
    Preorder::from_rows(p.field(), &rows, p.n())
}

pub fn is_stabilizer(phi: &Automorphism, p: &Preorder) -> Result<bool> {
    Ok(apply(phi, p)? == *p)
}

/// Image of a subspace basis under `phi` lies back in the subspace.
fn preserves_residue(phi: &Automorphism, p: &Preorder) -> bool {
    let g = p.residue_group();
    g.basis().iter().all(|b| g.coordinates(&phi.apply_vec(b)).is_some())
}

/// The map induced by `phi` on `Q^n / G_p`, in the quotient coordinates used
/// by [`quotient`]. Requires `phi(G_p) = G_p`.
pub fn induced_on_quotient(phi: &Automorphism, p: &Preorder) -> Option<Automorphism> {
    if !preserves_residue(phi, p) {
        return None;
    }
    let g = p.residue_group();
    let cols = complement_coordinates(g);
    let n = p.n();
    let project = |v: Vec<Q>| -> Vec<Q> {
        // subtract the residue part, which zeroes the pivot positions
        let mut c = v.clone();
        for (b, &piv) in g.basis().iter().zip(g.pivots()) {
            let t = v[piv].clone();
            for (x, y) in c.iter_mut().zip(b) {
                *x -= &t * y;
            }
        }
        cols.iter().map(|&j| c[j].clone()).collect()
    };
    let columns: Vec<Vec<Q>> = cols
        .iter()
        .map(|&j| {
            let mut e = vec![Q::zero(); n];
            e[j] = Q::one();
            project(phi.apply_vec(&e))
        })
        .collect();
    Automorphism::new(transpose(&columns)).ok()
}

/// Stabilizer test through the quotient: `phi(G_p) = G_p` and the induced map
/// fixes the induced preorder on `Q^n / G_p`.
pub fn stabilizes_via_quotient(phi: &Automorphism, p: &Preorder) -> Result<bool> {
    let Some(bar) = induced_on_quotient(phi, p) else {
        return Ok(false);
    };
    let q = quotient(p, p.residue_group())?;
    Ok(apply(&bar, &q)? == q)
}

/// `phi(G_p) = G_p` and `phi` induces a positive rational scalar on `Q^n / G_p`.
/// This is sufficient for `phi` to stabilize `p`, though not necessary.
pub fn is_positive_scalar_on_quotient(phi: &Automorphism, p: &Preorder) -> bool {
    let Some(bar) = induced_on_quotient(phi, p) else {
        return false;
    };
    let m = bar.matrix();
    if m.is_empty() {
        return true;
    }
    let lambda = &m[0][0];
    lambda.is_positive()
        && m.iter().enumerate().all(|(i, r)| {
            r.iter()
                .enumerate()
                .all(|(j, x)| if i == j { x == lambda } else { x.is_zero() })
        })
}

/// Number of random combinations of the solution space tried by [`orbit_witness`].
const ORBIT_SEARCH_TRIES: usize = 4000;

/// An automorphism carrying `p` to `q`, for preorders of the same type.
///
/// Solves jointly for `phi` and positive multipliers `lambda_k` in the field
/// with `r_k(p) . phi(w) = lambda_k r_k(q) . w` for all `w` in `W_(k-1)(q)`.
/// Any invertible solution with every `lambda_k > 0` maps the flag of `q` onto
/// that of `p` and carries `p` to `q`. The result is re-checked with [`apply`].
pub fn orbit_witness(p: &Preorder, q: &Preorder) -> Result<Automorphism> {
    p.same_space(q)?;
    if p.type_of() != q.type_of() {
        return Err(Error::TypeMismatch(p.type_of(), q.type_of()));
    }
    let n = p.n();
    let field = p.field();
    let d = field.degree();
    let s = p.rank();
    let unknowns = n * n + s * d;
    // alpha^t, for multiplying lambda's coefficients into place
    let powers: Vec<FieldElement> = (0..d)
        .map(|t| {
            let mut c = vec![Q::zero(); d];
            c[t] = Q::one();
            field.element(c).expect("degree-length vector")
        })
        .collect();
    let mut equations: Vec<Vec<Q>> = Vec::new();
    for k in 0..s {
        let rp = &p.rows()[k];
        let rq = &q.rows()[k];
        for w in q.flag()[k].basis() {
            // one field equation, split into d rational equations
            let mut eq = vec![vec![Q::zero(); unknowns]; d];
            for (i, rpi) in rp.entries().iter().enumerate() {
                for (j, wj) in w.iter().enumerate() {
                    if wj.is_zero() {
                        continue;
                    }
                    for (layer, c) in rpi.scale(wj).coeffs().iter().enumerate() {
                        eq[layer][i * n + j] += c;
                    }
                }
            }
            let target = crate::linalg::dot(w, rq)?;
            for (t, pw) in powers.iter().enumerate() {
                let contrib = &target * pw;
                for (layer, c) in contrib.coeffs().iter().enumerate() {
                    eq[layer][n * n + k * d + t] -= c;
                }
            }
            equations.extend(eq);
        }
    }
    let solutions = nullspace(&equations, unknowns);
    let basis = solutions.basis();
    if basis.is_empty() {
        return Err(Error::WitnessNotFound("linear system has only the zero solution".into()));
    }
    let lambda_sign = |v: &[Q], k: usize| {
        let lam = field
            .element(v[n * n + k * d..n * n + (k + 1) * d].to_vec())
            .expect("degree-length slice");
        lam.sign()
    };
    let try_vector = |v: &[Q]| -> Option<Automorphism> {
        let signs: Vec<_> = (0..s).map(|k| lambda_sign(v, k)).collect();
        let flip = if signs.iter().all(|o| o.is_gt()) {
            false
        } else if signs.iter().all(|o| o.is_lt()) {
            true
        } else {
            return None;
        };
        let matrix: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if flip { -&v[i * n + j] } else { v[i * n + j].clone() })
                    .collect()
            })
            .collect();
        let phi = Automorphism::new(matrix).ok()?;
        (apply(&phi, p).ok()? == *q).then_some(phi)
    };
    // deterministic: each basis vector, their sum, then seeded combinations
    let mut candidates: Vec<Vec<Q>> = basis.to_vec();
    let total = basis.iter().fold(vec![Q::zero(); unknowns], |acc, b| {
        acc.iter().zip(b).map(|(x, y)| x + y).collect()
    });
    candidates.push(total);
    for c in &candidates {
        if let Some(phi) = try_vector(c) {
            return Ok(phi);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..ORBIT_SEARCH_TRIES {
        let mut v = vec![Q::zero(); unknowns];
        for b in basis {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                let c = Q::from_integer(c.into());
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &c * y;
                }
            }
        }
        if let Some(phi) = try_vector(&v) {
            return Ok(phi);
        }
    }
    Err(Error::WitnessNotFound(format!(
        "no invertible positive solution among {} combinations",
        ORBIT_SEARCH_TRIES
    )))
}
