//! The three subcommands. Each returns a JSON report and an exit code.

use cycpair::bar::suite::{draw_samples, run_identity_suite, SampleSpec, SuiteCtx, SuiteReport};
use cycpair::bar::BarOps;
use cycpair::dga::{zoo, FiniteDga, MfAlgebra};
use cycpair::poly::milnor_data;
use cycpair::segal::bridge::{bridge_identity_checks, BridgeSpec};
use cycpair::segal::corollary::{
    flatness_residuals, retract_for, verify_corollary, CorollaryOptions, CorollaryReport, FlatnessOrders, FlatnessReport,
    ZLift,
};
use cycpair::segal::cycles::CycleSearch;
use cycpair::segal::SegalMap;
use cycpair::trace::GradedAlgebra;
use serde_json::{json, Value};

use crate::config::{Cutoffs, Problem, ZLiftKind};
use crate::error::{corollary_setup_error, CliError};
use crate::report::{coef, matrix, poly, rat, suite, vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Corrupt {
    /// Wrong sign in the cyclic permutation (identity suite).
    Tau,
    /// Wrong sign in the form map (bridge checks).
    Epsilon,
}

/// Cutoffs after command-line overrides.
pub struct Settings {
    pub cutoffs: Cutoffs,
    pub corrupt: Option<Corrupt>,
}

pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Settings {
    fn window(&self, a: &MfAlgebra) -> Option<((i64, i64), i64)> {
        let c = &self.cutoffs;
        if c.weight_window.is_none() && c.margin.is_none() {
            return None;
        }
        let w = c.weight_window.map(|[lo, hi]| (lo, hi)).unwrap_or_else(|| a.default_window());
        Some((w, c.margin.unwrap_or_else(|| a.default_margin())))
    }

    fn search(&self) -> CycleSearch {
        CycleSearch { length_cap: self.cutoffs.length_cap, slice_cap: self.cutoffs.slice_cap }
    }
}

fn header(command: &str, p: &Problem, s: &Settings) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("f".into(), poly(&p.f));
    m.insert("n".into(), json!(p.ws.n()));
    m.insert("weights".into(), json!(p.ws.weights()));
    m.insert("total_weight".into(), json!(p.ws.total()));
    m.insert("seed".into(), json!(s.cutoffs.seed));
    m
}

pub fn milnor(p: &Problem, s: &Settings) -> Result<Outcome, CliError> {
    let md = milnor_data(&p.f, &p.ws)?;
    let mu = md.mu();
    let basis: Vec<Value> = (0..mu)
        .map(|i| json!({ "monomial": poly(&md.basis_poly(i)), "exponent": md.basis()[i], "weight": md.basis_weight(i) }))
        .collect();
    let gram: Vec<Vec<_>> =
        (0..mu).map(|i| (0..mu).map(|j| md.residue_pairing(&md.basis_poly(i), &md.basis_poly(j))).collect()).collect();
    let k = md.socle_index();
    let mut m = header("milnor", p, s);
    m.insert("mu".into(), json!(mu));
    m.insert("basis".into(), Value::Array(basis));
    m.insert("socle".into(), json!({ "index": k, "weight": md.socle_weight(), "monomial": poly(&md.basis_poly(k)) }));
    m.insert(
        "hessian".into(),
        json!({ "polynomial": poly(md.hessian()), "socle_coordinate": rat(md.hessian_coordinate()) }),
    );
    m.insert("residue_gram".into(), matrix(&gram));
    Ok(Outcome { report: Value::Object(m), code: 0 })
}

fn run_finite(a: &FiniteDga, name: &str, s: &Settings) -> SuiteReport {
    let ops = if s.corrupt == Some(Corrupt::Tau) { BarOps::with_corrupted_tau(a) } else { BarOps::new(a) };
    let cx = SuiteCtx { a, ops, centrals: a.centrals().iter().map(|c| c.elem.clone()).collect() };
    let spec = SampleSpec { samples: s.cutoffs.samples, max_length: s.cutoffs.max_length, ..Default::default() };
    let samples = draw_samples(a, &a.basis(), cx.centrals.len(), s.cutoffs.seed, &spec);
    run_identity_suite(name, &cx, &samples)
}

pub fn identities(p: &Problem, s: &Settings) -> Result<Outcome, CliError> {
    let af = MfAlgebra::new(&p.f, &p.ws, p.parts.clone())?;
    let mut suites = Vec::new();
    if s.cutoffs.samples > 0 {
        for name in zoo::names() {
            let a = zoo::random_test_dga(name, s.cutoffs.seed).expect("registered zoo name");
            suites.push(run_finite(&a, name, s));
        }
        let t = s.cutoffs.truncation;
        suites.push(run_finite(&af.truncated(t).to_finite(), &format!("A_f mod (x)^{t}"), s));
    }
    let passed = suites.iter().all(|r| r.all_passed());
    let mut m = header("identities", p, s);
    m.insert("samples".into(), json!(s.cutoffs.samples));
    m.insert("suites".into(), Value::Array(suites.iter().map(suite).collect()));
    m.insert("passed".into(), json!(passed));
    Ok(Outcome { report: Value::Object(m), code: if passed { 0 } else { 1 } })
}

fn corollary_json(r: &CorollaryReport) -> Value {
    let cycles: Vec<Value> = r
        .cycles
        .iter()
        .map(|c| json!({ "length": c.length, "degree": c.degree, "terms": c.chain.len(), "class": vector(&c.class) }))
        .collect();
    let invariance: Vec<Value> = r
        .invariance
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "anchor": "const unchanged",
                "const": c.constant.as_ref().map(rat),
                "passed": c.constant.as_ref().is_none_or(|k| *k == r.constant),
                "note": c.note,
            })
        })
        .collect();
    json!({
        "n": r.n,
        "mu": r.mu,
        "cycles": cycles,
        "gram_a": matrix(&r.gram_a),
        "gram_f": matrix(&r.gram_f),
        "symmetry": { "gram_a": r.symmetry_a.name(), "gram_f": r.symmetry_f.name() },
        "det_a": rat(&r.det_a),
        "const": rat(&r.constant),
        "checks": [
            { "name": "nondegenerate", "anchor": "det GramA != 0", "passed": !r.det_a.is_zero() },
            { "name": "proportionality", "anchor": "GramF = const GramA", "passed": true },
        ],
        "invariance": invariance,
        "conjecture": {
            "anchor": "const = (-1)^{n(n+1)/2}",
            "expected": rat(&r.conjectured),
            "matches": r.matches_conjecture,
            "flag": if r.matches_conjecture { Value::Null } else { json!("const differs from (-1)^{n(n+1)/2}") },
        },
        "passed": true,
    })
}

fn flatness_json(g: &cycpair::poly::WPoly, r: &FlatnessReport) -> Value {
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "i": e.i,
                "j": e.j,
                "residual_u": coef(&e.residual_u),
                "residual_z": coef(&e.residual_z),
                "live_terms": e.live_terms,
            })
        })
        .collect();
    json!({
        "g": poly(g),
        "u_order": r.orders.u_order,
        "z_order": r.orders.z_order,
        "z_lift": match r.orders.z_lift { ZLift::Exponential => "exponential", ZLift::Solved => "solved" },
        "checks": [
            { "name": "flatness-u", "anchor": "K(nabla_u a, b) - K(a, nabla_u b) = d_u K(a, b)" },
            { "name": "flatness-z", "anchor": "K(nabla_z a, b) + K(a, nabla_z b) = d_z K(a, b)" },
        ],
        "entries": entries,
        "nontrivial": r.nontrivial(),
        "passed": r.passed(),
    })
}

pub fn verify(p: &Problem, s: &Settings) -> Result<Outcome, CliError> {
    let a = MfAlgebra::new(&p.f, &p.ws, p.parts.clone())?;
    let window = s.window(&a);
    let r = retract_for(&a, window)?;
    // H(A_f) is a Clifford algebra on n generators
    let want = 1usize << p.ws.n();
    if r.ha_dim() < want {
        return Err(CliError::Resource(format!(
            "window too small: it holds {} of {want} cohomology classes",
            r.ha_dim()
        )));
    }
    drop(r);
    let mut m = header("verify", p, s);
    let mut passed = true;

    let sm = if s.corrupt == Some(Corrupt::Epsilon) { SegalMap::with_corrupted_epsilon(&a) } else { SegalMap::new(&a) };
    if s.cutoffs.samples > 0 {
        let spec = BridgeSpec { samples: s.cutoffs.samples, ..BridgeSpec::default() };
        let r = bridge_identity_checks(&format!("A_{{{}}}", p.f), &sm, s.cutoffs.seed, &spec);
        passed &= r.all_passed();
        m.insert("bridge".into(), suite(&r));
    } else {
        m.insert("bridge".into(), Value::Null);
    }

    let opts = CorollaryOptions {
        search: s.search(),
        window,
        parts: p.parts.clone(),
        alt_parts: None,
        seed: s.cutoffs.seed,
    };
    match verify_corollary(&p.f, &p.ws, &opts) {
        Ok(r) => {
            m.insert("corollary".into(), corollary_json(&r));
        }
        Err(e) => {
            if let Some(err) = corollary_setup_error(&e) {
                return Err(err);
            }
            passed = false;
            m.insert("corollary".into(), json!({ "passed": false, "error": e.to_string() }));
        }
    }

    if let Some(g) = &p.central {
        let orders = FlatnessOrders {
            u_order: s.cutoffs.lift_order,
            z_order: s.cutoffs.z_order,
            z_lift: match s.cutoffs.z_lift {
                ZLiftKind::Exponential => ZLift::Exponential,
                ZLiftKind::Solved => ZLift::Solved,
            },
        };
        let r = flatness_residuals(&p.f, &p.ws, g, orders, &opts).map_err(|e| {
            corollary_setup_error(&e).unwrap_or_else(|| CliError::Resource(e.to_string()))
        })?;
        passed &= r.passed();
        m.insert("flatness".into(), flatness_json(g, &r));
    }
    m.insert("passed".into(), json!(passed));
    Ok(Outcome { report: Value::Object(m), code: if passed { 0 } else { 1 } })
}
