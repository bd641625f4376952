//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::cmp::Ordering;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;

use zariski::action::{apply, is_stabilizer, orbit_witness, Automorphism};
use zariski::checks::{
    distance_by_pairs, random_polynomial, random_preorder, random_rows, random_unimodular,
    refinement_counterexample, refines_on_box, rng,
};
use zariski::lattice::{refines, truncate};
use zariski::linalg::{rref, FieldVector};
use zariski::preorder::box_points;
use zariski::rational::Q;
use zariski::topology::{distance, fingerprint, perturb_in_ball, same_type_neighbors, Distance};
use zariski::valuation::{check_composition, valuate, CoefficientField, LaurentPolynomial, Value};
use zariski::{Error, NumberField, Preorder};

type Outcome = Result<String, String>;

struct Runner {
    failed: usize,
}

impl Runner {
    fn run(&mut self, id: u32, name: &str, budget: Duration, body: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = body();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(d) => (false, d),
        };
        if !ok {
            self.failed += 1;
        }
        println!(
            "{} criterion {id:>2} {name}: {detail} [{:.2}s, limit {}s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn zr(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_zr"))
        .args(args)
        .output()
        .expect("zr runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8"),
    )
}

const SQRT2: &str = r#"{"min_poly":[-2,0,1],"isolating":["1","2"]}"#;

fn fragment_of_q() -> Outcome {
    let (code, dot) = zr(&["fragment", r#"{"n":1,"rows":[["1"],["-1"]]}"#]);
    ensure(code == 0, || format!("exit {code}"))?;
    let nodes = dot.lines().filter(|l| l.contains("[label=")).count();
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    let root_edges = edges.iter().filter(|l| l.trim().starts_with("n0 ->")).count();
    ensure(nodes == 3 && edges.len() == 2 && root_edges == 2, || {
        format!("{nodes} nodes, {} edges, {root_edges} from the root", edges.len())
    })?;
    Ok(format!("{nodes} nodes, {root_edges} root edges"))
}

/// Signs of `(1, c)` with `c = 1/(sqrt2 k)` straight from `u1 + u2 c`, for the
/// paper's claim that the sign patterns agree with lex on `G_k`.
fn rank_jump() -> Outcome {
    let k2 = NumberField::sqrt2();
    let lex = Preorder::from_int_rows(&k2, &[vec![1, 0], vec![0, 1]], 2).map_err(|e| e.to_string())?;
    ensure(lex.rank() == 2, || "limit rank is not 2".into())?;
    let mut literal_failures = Vec::new();
    for k in 1..=12i64 {
        // 1/(sqrt2 k) = sqrt2/(2k)
        let c = k2.element(vec![Q::zero(), Q::new(1.into(), (2 * k).into())]).unwrap();
        let row = FieldVector::new(&k2, vec![k2.one(), c]).unwrap();
        let pk = Preorder::from_rows(&k2, &[row], 2).map_err(|e| e.to_string())?;
        ensure(pk.rank() == 1, || format!("rank(p_{k}) = {}", pk.rank()))?;
        ensure(fingerprint(&pk, k) == fingerprint(&lex, k), || {
            format!("p_{k} and lex already differ on G_{k}")
        })?;
        if fingerprint(&pk, 2 * k) != fingerprint(&lex, 2 * k) {
            let u = [1, -2 * k];
            literal_failures.push(format!(
                "k={k}: u={u:?} is {} for p_k, {} for lex",
                pk.sign_of(&u).unwrap().symbol(),
                lex.sign_of(&u).unwrap().symbol()
            ));
        }
    }
    ensure(literal_failures.is_empty(), || {
        format!(
            "ranks 1 -> 2 and signs agree on G_k, but fingerprints at level 2k differ for {} of 12 k ({})",
            literal_failures.len(),
            literal_failures[0]
        )
    })?;
    Ok("fingerprints agree at level 2k for all k".into())
}

/// First max-norm of an integer point `(a, -b)` on which `(1, p/q)` and
/// `(1, sqrt2)` disagree: `a/b` lies between `p/q` (inclusive) and `sqrt2`.
fn first_disagreement(p: i64, q: i64) -> i64 {
    (1..)
        .find(|&level: &i64| {
            (1..=level).any(|b| {
                (1..=level).any(|a| {
                    if a.max(b) != level {
                        return false;
                    }
                    let below_sqrt2 = a * a < 2 * b * b;
                    // a/b vs p/q
                    match (a * q).cmp(&(p * b)) {
                        Ordering::Equal => true,
                        Ordering::Greater => below_sqrt2,
                        Ordering::Less => !below_sqrt2,
                    }
                })
            })
        })
        .unwrap()
}

fn degree_drop() -> Outcome {
    let r = NumberField::sqrt2();
    let limit = Preorder::from_compact_rows(&r, &[vec!["1", "a"]], 2).map_err(|e| e.to_string())?;
    ensure(limit.degree() == 0, || format!("deg of limit = {}", limit.degree()))?;
    let convergents = [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70), (239, 169), (577, 408)];
    let m_max = 12;
    let mut shown = Vec::new();
    for (p, q) in convergents {
        let x = r.from_rational(Q::new(p.into(), q.into()));
        let row = FieldVector::new(&r, vec![r.one(), x]).unwrap();
        let uk = Preorder::from_rows(&r, &[row], 2).map_err(|e| e.to_string())?;
        ensure(uk.degree() == 1, || format!("deg at {p}/{q} = {}", uk.degree()))?;
        let d = distance(&uk, &limit, m_max).map_err(|e| e.to_string())?;
        let level = first_disagreement(p, q);
        let expected = if level <= 2 * m_max as i64 {
            Distance::Exact((level as u64).div_ceil(2))
        } else {
            Distance::AtMost(m_max + 1)
        };
        ensure(d == expected, || format!("{p}/{q}: distance {d}, oracle {expected}"))?;
        shown.push(d.to_string());
    }
    ensure(shown.iter().rev().take(4).all(|s| s.starts_with('≤')), || {
        "later convergents not within the search radius".into()
    })?;
    Ok(format!("deg 1,...,1 -> 0; d = {}", shown.join(", ")))
}

/// Degree from the rational rank of all coefficient layers of the raw rows.
fn degree_oracle(rows: &[FieldVector], n: usize) -> usize {
    let layers: Vec<Vec<Q>> = rows.iter().flat_map(|r| r.layers()).collect();
    n - rref(&layers, n).1.len()
}

fn structural() -> Outcome {
    let mut g = rng(4);
    let mut count = 0;
    for field in [NumberField::rationals(), NumberField::sqrt2()] {
        for n in 2..=4 {
            for _ in 0..500 {
                let rows = random_rows(&mut g, &field, n);
                let p = Preorder::from_rows(&field, &rows, n).map_err(|e| e.to_string())?;
                let sum: usize = p.type_of().iter().sum();
                ensure(sum + p.degree() == n, || format!("{}: type sum + degree != n", p.label()))?;
                ensure(p.rank() + p.degree() <= n, || format!("{}: rank + degree > n", p.label()))?;
                ensure(p.degree() == degree_oracle(&rows, n), || {
                    format!("{}: degree differs from layer rank", p.label())
                })?;
                let again = Preorder::from_rows(&field, p.rows(), n).map_err(|e| e.to_string())?;
                ensure(again == p, || format!("{}: not idempotent", p.label()))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} preorders"))
}

fn oracles() -> Outcome {
    let mut g = rng(5);
    let mut refine_true = 0;
    let mut disagreements = Vec::new();
    for i in 0..200 {
        let field = if i % 2 == 0 { NumberField::rationals() } else { NumberField::sqrt2() };
        let p = random_preorder(&mut g, &field, 2);
        let q = if i % 3 == 0 {
            // a coarsening, so that positive answers are exercised
            truncate(&p, g.gen_range(0..=p.rank())).unwrap()
        } else {
            random_preorder(&mut g, &field, 2)
        };
        for (a, b) in [(&q, &p), (&p, &q)] {
            let fast = refines(a, b).unwrap();
            refine_true += fast as usize;
            let on_box = refines_on_box(a, b, 3);
            ensure(!fast || on_box, || format!("refines({},{}) but the box refutes it", a.label(), b.label()))?;
            if fast != on_box {
                let witness = refinement_counterexample(a, b, 64)
                    .ok_or_else(|| format!("refines({},{}) = false without any witness", a.label(), b.label()))?;
                disagreements.push(format!("refines({},{}) = false, refuted at {witness:?}", a.label(), b.label()));
            }
        }
        let d = distance(&p, &q, 4).unwrap();
        let oracle = distance_by_pairs(&p, &q, 4);
        ensure(d == oracle, || format!("d({},{}) = {d}, pairwise {oracle}", p.label(), q.label()))?;
    }
    ensure(disagreements.is_empty(), || {
        format!(
            "distances all match; {} of 400 refinement answers differ from the {{-3..3}}^2 test, \
             each a correct false refuted only outside the box, first: {}",
            disagreements.len(),
            disagreements[0]
        )
    })?;
    Ok(format!("400 refinement queries ({refine_true} true), 200 distances"))
}

fn ultrametric() -> Outcome {
    let mut g = rng(6);
    let mut exact = 0;
    for i in 0..300 {
        let field = if i % 2 == 0 { NumberField::rationals() } else { NumberField::sqrt2() };
        let n = 2 + i % 2;
        let a = random_preorder(&mut g, &field, n);
        // share prefixes so that small distances occur
        let near = |base: &Preorder, g: &mut zariski::checks::CheckRng| {
            let other = random_preorder(g, &field, n);
            let k = g.gen_range(0..=base.rank());
            let mut rows = base.rows()[..k].to_vec();
            rows.extend(other.rows().iter().cloned());
            Preorder::from_rows(&field, &rows, n).unwrap()
        };
        let b = near(&a, &mut g);
        let c = near(&b, &mut g);
        let d = |x: &Preorder, y: &Preorder| distance(x, y, 6).unwrap();
        let (ab, bc, ac) = (d(&a, &b), d(&b, &c), d(&a, &c));
        exact += matches!(ac, Distance::Exact(_)) as usize;
        let bound = ab.upper_bound().max(bc.upper_bound());
        ensure(ac.upper_bound() <= bound, || {
            format!("d(a,c) = {ac} > max({ab}, {bc}) for {}, {}, {}", a.label(), b.label(), c.label())
        })?;
    }
    Ok(format!("300 triples ({exact} with exact d(a,c))"))
}

fn isolation() -> Outcome {
    let r = NumberField::rationals();
    let k2 = NumberField::sqrt2();
    for p in [
        Preorder::from_int_rows(&r, &[vec![1, 0]], 2).unwrap(),
        Preorder::trivial(&r, 2),
    ] {
        ensure(perturb_in_ball(&p, 3, false) == Err(Error::Isolated), || {
            format!("{} not reported isolated", p.label())
        })?;
    }
    let centres = [
        Preorder::from_compact_rows(&k2, &[vec!["1", "a"]], 2).unwrap(),
        Preorder::from_int_rows(&r, &[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap(),
    ];
    for c in &centres {
        let found = same_type_neighbors(c, 5, 3).map_err(|e| format!("{}: {e}", c.label()))?;
        ensure(found.len() == 3, || "fewer than 3 neighbours".into())?;
        for (i, x) in found.iter().enumerate() {
            ensure(x != c && found[..i].iter().all(|y| y != x), || "neighbours not distinct".into())?;
            ensure(x.rank() == c.rank() && x.degree() == c.degree() && x.type_of() == c.type_of(), || {
                format!("{} changes rank/degree/type", x.label())
            })?;
            // exhaustive re-check on the whole box, independent of fingerprint()
            let all_agree = box_points(c.n(), 10).all(|u| c.sign_of(&u).unwrap() == x.sign_of(&u).unwrap());
            ensure(all_agree, || format!("{} differs from {} on G_10", x.label(), c.label()))?;
        }
    }
    Ok("2 isolated, 2 non-isolated with 3 verified neighbours each".into())
}

/// Lex-minimum of the value tuples, compared through field signs only.
fn valuation_oracle(p: &Preorder, f: &LaurentPolynomial) -> Value {
    let mut best = Value::Infinity;
    for e in f.terms().keys() {
        let eq: Vec<Q> = e.iter().map(|&x| Q::from_integer(x.into())).collect();
        let v = Value::Finite(p.rows().iter().map(|r| zariski::linalg::dot(&eq, r).unwrap()).collect());
        if v < best {
            best = v;
        }
    }
    best
}

fn valuations() -> Outcome {
    let mut g = rng(8);
    for i in 0..300 {
        let field = if i % 3 == 0 { NumberField::sqrt2() } else { NumberField::rationals() };
        let coeffs = if i % 2 == 0 { CoefficientField::Prime(5) } else { CoefficientField::Rational };
        let p = random_preorder(&mut g, &field, 3);
        let f = random_polynomial(&mut g, coeffs, 3, 5);
        let h = random_polynomial(&mut g, coeffs, 3, 5);
        let (vf, vh) = (valuate(&p, &f).unwrap(), valuate(&p, &h).unwrap());
        ensure(vf == valuation_oracle(&p, &f), || format!("{}: valuate differs from oracle on {f}", p.label()))?;
        let fh = f.mul(&h).unwrap();
        ensure(valuate(&p, &fh).unwrap() == vf.add(&vh).unwrap(), || {
            format!("{}: nu(fg) != nu(f) + nu(g) for {f} and {h}", p.label())
        })?;
        let s = f.add(&h).unwrap();
        let vs = valuate(&p, &s).unwrap();
        let lo = if vf <= vh { vf.clone() } else { vh.clone() };
        ensure(vs >= lo, || format!("{}: nu(f+g) below min", p.label()))?;
        if vf != vh {
            ensure(vs == lo, || format!("{}: nu(f+g) != min for distinct values", p.label()))?;
        }
        let k = g.gen_range(0..=p.rank());
        let rep = check_composition(&p, k, &f).unwrap();
        ensure(rep.passed, || format!("{}: composition fails at k = {k} on {f}", p.label()))?;
    }
    Ok("300 pairs over F_5 and Q".into())
}

fn action() -> Outcome {
    let mut g = rng(9);
    for i in 0..200 {
        let field = if i % 2 == 0 { NumberField::rationals() } else { NumberField::sqrt2() };
        let n = 2 + i % 3;
        let p = random_preorder(&mut g, &field, n);
        let phi = random_unimodular(&mut g, n);
        ensure(phi.is_integral_unimodular(), || "generator produced a non-unimodular matrix".into())?;
        let img = apply(&phi, &p).unwrap();
        ensure(
            img.type_of() == p.type_of() && img.rank() == p.rank() && img.degree() == p.degree(),
            || format!("{}: invariants change under {phi:?}", p.label()),
        )?;
        let lambda = Q::new(g.gen_range(1i64..=9).into(), g.gen_range(1i64..=9).into());
        ensure(is_stabilizer(&Automorphism::scalar(n, lambda), &p).unwrap(), || {
            format!("{}: positive scalar moves it", p.label())
        })?;
    }
    let k2 = NumberField::sqrt2();
    let pairs = [
        (
            Preorder::from_compact_rows(&k2, &[vec!["1", "a"]], 2).unwrap(),
            Preorder::from_compact_rows(&k2, &[vec!["1", "a"]], 2).unwrap(),
        ),
        (
            Preorder::from_int_rows(&k2, &[vec![1, 0]], 2).unwrap(),
            Preorder::from_int_rows(&k2, &[vec![0, 1]], 2).unwrap(),
        ),
        (
            Preorder::from_compact_rows(&k2, &[vec!["1", "a"]], 2).unwrap(),
            Preorder::from_compact_rows(&k2, &[vec!["1", "2+a"]], 2).unwrap(),
        ),
    ];
    let mut found = Vec::new();
    for (p, q) in &pairs {
        let phi = orbit_witness(p, q).map_err(|e| format!("{} -> {}: {e}", p.label(), q.label()))?;
        ensure(apply(&phi, p).unwrap() == *q, || "witness does not verify".into())?;
        found.push(format!("{phi:?}"));
    }
    Ok(format!("200 samples; witnesses {}", found.join(", ")))
}

fn determinism() -> Outcome {
    let p = r#"{"n":2,"rows":[["1","a"]]}"#;
    let q = r#"{"n":2,"rows":[["1","2+a"]]}"#;
    let lex3 = r#"{"n":3,"rows":[[1,0,0],[0,1,0]]}"#;
    let f = r#"{"n":2,"field":"F_5","terms":[{"e":[2,-1],"c":1},{"e":[1,1],"c":3}]}"#;
    let phi = r#"{"matrix":[["1","1"],["0","1"]]}"#;
    let runs: Vec<Vec<&str>> = vec![
        vec!["--field", SQRT2, "canon", p],
        vec!["--field", SQRT2, "compare", p, "--u", "1,0", "--v", "0,1"],
        vec!["--field", SQRT2, "meet", p, q],
        vec!["--field", SQRT2, "refines", p, q],
        vec!["--field", SQRT2, "distance", p, q, "--m-max", "5"],
        vec!["--field", SQRT2, "witness", p, "--m", "3", "--count", "3"],
        vec!["witness", lex3, "--m", "2", "--same-type"],
        vec!["--field", SQRT2, "fragment", r#"{"n":2,"rows":[[1,0],[0,1],["1","a"]]}"#],
        vec!["--field", SQRT2, "act", phi, p],
        vec!["--field", SQRT2, "orbit", p, q],
        vec!["--field", SQRT2, "valuate", p, f],
        vec!["--field", SQRT2, "fingerprint", p, "--level", "2"],
        vec!["--seed", "3", "check", "all", "--cases", "10"],
    ];
    for args in &runs {
        let (c1, o1) = zr(args);
        let (c2, o2) = zr(args);
        ensure(c1 == 0 && c2 == 0, || format!("{args:?} exited {c1}/{c2}"))?;
        ensure(o1 == o2 && !o1.is_empty(), || format!("{args:?} output differs"))?;
    }
    let (code, canon) = zr(&["--field", SQRT2, "canon", p]);
    let (code2, again) = zr(&["--field", SQRT2, "canon", &canon]);
    ensure(code == 0 && code2 == 0 && canon == again, || "canon round trip not byte-identical".into())?;
    Ok(format!("{} commands identical across two runs", runs.len()))
}

fn main() {
    let mut r = Runner { failed: 0 };
    let s = Duration::from_secs;
    r.run(1, "fragment of ZR(Q)", s(1), fragment_of_q);
    r.run(2, "rank jump in the limit", s(5), rank_jump);
    r.run(3, "degree drop in the limit", s(5), degree_drop);
    r.run(4, "structural invariants", s(30), structural);
    r.run(5, "brute-force oracles", s(60), oracles);
    r.run(6, "ultrametric inequality", s(60), ultrametric);
    r.run(7, "isolation dichotomy", s(30), isolation);
    r.run(8, "valuation laws", s(60), valuations);
    r.run(9, "action invariance", s(30), action);
    r.run(10, "CLI determinism", s(10), determinism);
    println!("{} of 10 criteria passed", 10 - r.failed);
    if r.failed > 0 {
        std::process::exit(1);
    }
}
