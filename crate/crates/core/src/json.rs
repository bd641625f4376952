//! JSON encodings of fields, elements, preorders, automorphisms, polynomials
//! and fingerprints. Encoders emit one canonical form; decoders are lenient
//! about number-versus-string spellings.

use num_bigint::BigInt;
use serde_json::{json, Map, Value as Json};

use crate::action::Automorphism;
use crate::error::{Error, Result};
use crate::linalg::FieldVector;
use crate::preorder::Preorder;
use crate::rational::{fmt_q, parse_q, Q};
use crate::realfield::{FieldElement, NumberField};
use crate::topology::Fingerprint;
use crate::valuation::{Coefficient, CoefficientField, LaurentPolynomial, Value};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn object<'a>(v: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    v.as_object()
        .ok_or_else(|| parse_err(format!("{what}: expected an object")))
}

fn array<'a>(v: &'a Json, what: &str) -> Result<&'a Vec<Json>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("{what}: expected an array")))
}

fn usize_of(v: &Json, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(format!("{what}: expected a non-negative integer")))
}

fn i64_of(v: &Json, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| parse_err(format!("{what}: expected an integer")))
}

/// A rational written as `"p/q"`, `"p"` or a JSON integer.
pub fn rational_from_json(v: &Json) -> Result<Q> {
    match v {
        Json::String(s) => parse_q(s),
        Json::Number(n) => n
            .as_i64()
            .map(|x| Q::from_integer(x.into()))
            .ok_or_else(|| parse_err(format!("non-integer number {n}; write rationals as \"p/q\""))),
        _ => Err(parse_err(format!("expected a rational, found {v}"))),
    }
}

fn bigint_from_json(v: &Json) -> Result<BigInt> {
    match v {
        Json::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| parse_err(format!("expected an integer, found {n}"))),
        Json::String(s) => s
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("expected an integer, found {s:?}"))),
        _ => Err(parse_err(format!("expected an integer, found {v}"))),
    }
}

fn bigint_to_json(x: &BigInt) -> Json {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

/// `{"min_poly": [c_0, ..., c_d], "isolating": ["lo", "hi"]}`, coefficients
/// listed from the constant term up.
pub fn field_to_json(f: &NumberField) -> Json {
    let (lo, hi) = f.isolating_interval();
    json!({
        "min_poly": f.min_poly().iter().map(bigint_to_json).collect::<Vec<_>>(),
        "isolating": [fmt_q(lo), fmt_q(hi)],
    })
}

pub fn field_from_json(v: &Json) -> Result<NumberField> {
    let o = object(v, "field")?;
    let poly = array(o.get("min_poly").ok_or_else(|| parse_err("field: missing min_poly"))?, "min_poly")?
        .iter()
        .map(bigint_from_json)
        .collect::<Result<Vec<_>>>()?;
    let iso = array(o.get("isolating").ok_or_else(|| parse_err("field: missing isolating"))?, "isolating")?;
    if iso.len() != 2 {
        return Err(parse_err("isolating: expected [lo, hi]"));
    }
    let assert_irreducible = o
        .get("assert_irreducible")
        .and_then(Json::as_bool)
        .unwrap_or(false);
    NumberField::from_big(
        poly,
        rational_from_json(&iso[0])?,
        rational_from_json(&iso[1])?,
        assert_irreducible,
    )
}

/// Rational elements as a single string; others as their coefficient array.
pub fn element_to_json(e: &FieldElement) -> Json {
    if e.field().degree() == 1 {
        json!(fmt_q(&e.coeffs()[0]))
    } else {
        Json::Array(e.coeffs().iter().map(|c| json!(fmt_q(c))).collect())
    }
}

/// Accepts a coefficient array, an integer, or a string in compact notation
/// such as `"1/2"` or `"3-2*a"`.
pub fn element_from_json(field: &NumberField, v: &Json) -> Result<FieldElement> {
    match v {
        Json::Array(cs) => {
            let coeffs = cs.iter().map(rational_from_json).collect::<Result<Vec<_>>>()?;
            if coeffs.len() != field.degree() {
                return Err(Error::DimensionMismatch {
                    expected: field.degree(),
                    found: coeffs.len(),
                });
            }
            field.element(coeffs)
        }
        Json::String(s) => match parse_q(s) {
            Ok(x) => Ok(field.from_rational(x)),
            Err(_) => field.parse_compact(s),
        },
        _ => Ok(field.from_rational(rational_from_json(v)?)),
    }
}

pub fn vector_to_json(v: &FieldVector) -> Json {
    Json::Array(v.entries().iter().map(element_to_json).collect())
}

fn check_field(o: &Map<String, Json>, field: &NumberField) -> Result<()> {
    if let Some(f) = o.get("field") {
        if field_from_json(f)? != *field {
            return Err(Error::FieldMismatch);
        }
    }
    Ok(())
}

/// The raw rows of a preorder object, before canonicalization.
pub fn rows_from_json(field: &NumberField, v: &Json) -> Result<(usize, Vec<FieldVector>)> {
    let o = object(v, "preorder")?;
    check_field(o, field)?;
    let n = usize_of(o.get("n").ok_or_else(|| parse_err("preorder: missing n"))?, "n")?;
    let rows = match o.get("rows") {
        None => Vec::new(),
        Some(r) => array(r, "rows")?
            .iter()
            .map(|row| {
                let entries = array(row, "row")?
                    .iter()
                    .map(|e| element_from_json(field, e))
                    .collect::<Result<Vec<_>>>()?;
                if entries.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: entries.len(),
                    });
                }
                FieldVector::new(field, entries)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok((n, rows))
}

pub fn preorder_from_json(field: &NumberField, v: &Json) -> Result<Preorder> {
    let (n, rows) = rows_from_json(field, v)?;
    Preorder::from_rows(field, &rows, n)
}

/// Canonical rows plus a `summary` block with rank, degree and type.
pub fn preorder_to_json(p: &Preorder) -> Json {
    json!({
        "n": p.n(),
        "field": field_to_json(p.field()),
        "rows": p.rows().iter().map(vector_to_json).collect::<Vec<_>>(),
        "summary": {
            "rank": p.rank(),
            "degree": p.degree(),
            "type": p.type_of(),
        },
    })
}

pub fn automorphism_to_json(phi: &Automorphism) -> Json {
    json!({
        "matrix": phi
            .matrix()
            .iter()
            .map(|r| r.iter().map(fmt_q).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn automorphism_from_json(v: &Json) -> Result<Automorphism> {
    let o = object(v, "automorphism")?;
    let m = array(o.get("matrix").ok_or_else(|| parse_err("automorphism: missing matrix"))?, "matrix")?
        .iter()
        .map(|r| array(r, "matrix row")?.iter().map(rational_from_json).collect())
        .collect::<Result<Vec<Vec<Q>>>>()?;
    Automorphism::new(m)
}

fn coefficient_to_json(c: &Coefficient) -> Json {
    match c {
        Coefficient::Rational(x) if x.is_integer() => bigint_to_json(x.numer()),
        Coefficient::Rational(x) => json!(fmt_q(x)),
        Coefficient::Modular(x) => json!(x),
    }
}

pub fn polynomial_to_json(f: &LaurentPolynomial) -> Json {
    let terms: Vec<Json> = f
        .terms()
        .iter()
        .map(|(e, c)| json!({"e": e, "c": coefficient_to_json(c)}))
        .collect();
    json!({
        "n": f.n(),
        "field": f.coefficient_field().name(),
        "terms": terms,
    })
}

pub fn polynomial_from_json(v: &Json) -> Result<LaurentPolynomial> {
    let o = object(v, "polynomial")?;
    let n = usize_of(o.get("n").ok_or_else(|| parse_err("polynomial: missing n"))?, "n")?;
    let field = match o.get("field") {
        None => CoefficientField::Rational,
        Some(Json::String(s)) => CoefficientField::parse(s)?,
        Some(other) => return Err(parse_err(format!("polynomial field: {other}"))),
    };
    let terms = match o.get("terms") {
        None => Vec::new(),
        Some(t) => array(t, "terms")?
            .iter()
            .map(|t| {
                let t = object(t, "term")?;
                let e = array(t.get("e").ok_or_else(|| parse_err("term: missing e"))?, "e")?
                    .iter()
                    .map(|x| i64_of(x, "exponent"))
                    .collect::<Result<Vec<_>>>()?;
                let c = rational_from_json(t.get("c").ok_or_else(|| parse_err("term: missing c"))?)?;
                Ok((e, c))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    LaurentPolynomial::from_terms(field, n, terms)
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Infinity => json!({"value": "inf"}),
        Value::Finite(t) => json!({"value": t.iter().map(element_to_json).collect::<Vec<_>>()}),
    }
}

/// Every point of the box with its sign class, in lexicographic order.
pub fn fingerprint_to_json(fp: &Fingerprint) -> Json {
    let signs: Vec<Json> = fp
        .entries()
        .into_iter()
        .map(|(u, s)| json!({"u": u, "s": s.symbol()}))
        .collect();
    json!({"level": fp.level(), "n": fp.n(), "signs": signs})
}

/// Parses a comma-separated integer vector such as `1,-2,0`.
pub fn int_vector(s: &str) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| parse_err(format!("bad integer {x:?} in vector")))
        })
        .collect()
}
