//! JSON encodings. Rationals are `"p/q"` strings and matrices row-major arrays.

use cycpair::bar::suite::{IdentityResult, SuiteReport};
use cycpair::bar::Coef;
use cycpair::exact::Rational;
use cycpair::poly::WPoly;
use serde_json::{json, Value};

pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn matrix(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|row| vector(row)).collect())
}

pub fn poly(p: &WPoly) -> Value {
    Value::String(p.to_string())
}

/// A Laurent polynomial as `{"u^a z^c": "p/q"}`.
pub fn coef(c: &Coef) -> Value {
    Value::Object(c.terms().map(|(m, v)| (m.to_string(), rat(v))).collect())
}

pub fn identity(r: &IdentityResult) -> Value {
    json!({
        "name": r.name,
        "anchor": r.anchor,
        "samples": r.samples,
        "failures": r.failures,
        "nontrivial": r.nontrivial,
        "passed": r.passed(),
        "witness": r.witness,
    })
}

pub fn suite(r: &SuiteReport) -> Value {
    json!({
        "algebra": r.algebra,
        "passed": r.all_passed(),
        "checks": r.results.iter().map(identity).collect::<Vec<_>>(),
    })
}
