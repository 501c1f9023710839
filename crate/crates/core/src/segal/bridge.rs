//! Randomized checks that `I_f` intertwines the operators on `C_*(A_f)` with
//! the operators on forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::forms::Form;
use super::map::SegalMap;
use crate::bar::suite::{show_chain, IdentityResult, SuiteReport};
use crate::bar::{Chain, Mono, Op};
use crate::dga::{Elem, MfBasis, SuperAlgebra};
use crate::exact::Rational;
use crate::poly::{Exponent, WPoly};
use crate::trace::checks::run_parallel;

type Probe = Result<bool, String>;

#[derive(Clone, Debug)]
pub struct BridgeSpec {
    pub samples: usize,
    /// Longest random tensor; defaults to `n + 1`.
    pub max_len: Option<usize>,
    /// Tensors per random chain.
    pub spread: usize,
    /// Entries are drawn from weights `w_min ..= w_min + weight_range`.
    pub weight_range: i64,
}

impl Default for BridgeSpec {
    fn default() -> Self {
        BridgeSpec { samples: 100, max_len: None, spread: 2, weight_range: 6 }
    }
}

pub struct BridgeSample {
    pub x: Chain<MfBasis>,
    pub p: Chain<Exponent>,
    pub g: WPoly,
    pub g2: WPoly,
}

pub struct BridgeCtx<'s, 'a> {
    pub sm: &'s SegalMap<'a>,
    pub f: WPoly,
}

impl BridgeCtx<'_, '_> {
    fn g_elem(&self, g: &WPoly) -> Elem<MfBasis> {
        self.sm.central(g)
    }

    /// `(e(g) + uE(g)) x` on `A_f`.
    fn e_u(&self, g: &WPoly, x: &Chain<MfBasis>) -> Chain<MfBasis> {
        let c = self.g_elem(g);
        let ops = self.sm.ops();
        ops.apply(Op::Ec(&c), x).plus(&ops.apply(Op::BigEc(&c), x).times_u(1))
    }

    /// `(mu0 + u s N') x`.
    fn mu_usn(&self, x: &Chain<MfBasis>) -> Chain<MfBasis> {
        let ops = self.sm.ops();
        let sn = ops.apply(Op::S, &ops.apply(Op::NPrime, x));
        ops.apply(Op::Mu0, x).plus(&sn.times_u(1))
    }

    fn i(&self, x: &Chain<MfBasis>) -> Form {
        self.sm.apply(x)
    }

    /// `H = I_f(mu0 + usN') - eps str (mu0 + usN') exp(-b(D_f)) + f d I_f`.
    /// With `eps` ordered `dphi1 ^ ... ^ dphil` the `f d I_f` term enters with `+`.
    fn h(&self, x: &Chain<MfBasis>) -> Form {
        let n = self.sm.n();
        let mut out = self.i(&self.mu_usn(x));
        out = out.minus(&self.sm.eps_str(&self.mu_usn(&self.sm.exp_neg_bd(x, n + 1))));
        out.plus(&self.i(x).d().mul_poly(&self.f))
    }

    /// `-g d I_f`, the homotopy that holds with `eps` ordered as above.
    fn gdi(&self, g: &WPoly, x: &Chain<MfBasis>) -> Form {
        self.i(x).d().mul_poly(g).neg()
    }

    fn b_u(&self, x: &Chain<MfBasis>) -> Chain<MfBasis> {
        self.sm.ops().b_plus_ub(x)
    }
}

fn compare_forms(lhs: Form, rhs: Form) -> Probe {
    if lhs == rhs {
        Ok(!lhs.is_zero())
    } else {
        Err(format!("lhs = {lhs}; rhs = {rhs}"))
    }
}

fn compare_chains<B: Ord + Clone + std::fmt::Debug>(lhs: Chain<B>, rhs: Chain<B>) -> Probe {
    if lhs == rhs {
        Ok(!lhs.is_zero())
    } else {
        Err(format!("difference {:?}", lhs.minus(&rhs).0))
    }
}

pub struct BridgeCheck {
    pub name: &'static str,
    pub anchor: &'static str,
    pub run: fn(&BridgeCtx<'_, '_>, &BridgeSample) -> Probe,
}

fn if_b(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let lhs = c.i(&c.sm.ops().apply(Op::B, &s.x));
    compare_forms(lhs, c.i(&s.x).wedge_d(&c.f).neg())
}

fn if_connes(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let lhs = c.i(&c.sm.ops().apply(Op::Connes, &s.x));
    compare_forms(lhs, c.i(&s.x).d())
}

fn if_bg(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let g = c.g_elem(&s.g);
    let lhs = c.i(&c.sm.ops().apply(Op::Bc(&g), &s.x));
    compare_forms(lhs, c.i(&s.x).wedge_d(&s.g).neg())
}

fn bd_bg(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let g = c.g_elem(&s.g);
    let ops = c.sm.ops();
    let lhs = c.sm.b_d(&ops.apply(Op::Bc(&g), &s.x));
    compare_chains(lhs, ops.apply(Op::Bc(&g), &c.sm.b_d(&s.x)))
}

fn str_bg(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let g = c.g_elem(&s.g);
    let pg = c.sm.poly_elem(&s.g);
    let lhs = c.sm.chain_str(&c.sm.ops().apply(Op::Bc(&g), &s.x));
    compare_chains(lhs, c.sm.poly_ops().apply(Op::Bc(&pg), &c.sm.chain_str(&s.x)))
}

fn eps_bg(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let pg = c.sm.poly_elem(&s.g);
    let lhs = c.sm.hkr_epsilon(&c.sm.poly_ops().apply(Op::Bc(&pg), &s.p));
    compare_forms(lhs, c.sm.hkr_epsilon(&s.p).wedge_d(&s.g).neg())
}

fn bd_eg(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let lhs = c.sm.b_d(&c.e_u(&s.g, &s.x));
    compare_chains(lhs, c.e_u(&s.g, &c.sm.b_d(&s.x)))
}

fn str_eg(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let pg = c.sm.poly_elem(&s.g);
    let pops = c.sm.poly_ops();
    let lhs = c.sm.chain_str(&c.e_u(&s.g, &s.x));
    let sx = c.sm.chain_str(&s.x);
    let rhs = pops.apply(Op::Ec(&pg), &sx).plus(&pops.apply(Op::BigEc(&pg), &sx).times_u(1));
    compare_chains(lhs, rhs)
}

fn eps_eg(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let pg = c.sm.poly_elem(&s.g);
    let lhs = c.sm.hkr_epsilon(&c.sm.poly_ops().apply(Op::Ec(&pg), &s.p));
    compare_forms(lhs, c.sm.hkr_epsilon(&s.p).mul_poly(&s.g))
}

fn bg_mu_sn(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let g = c.g_elem(&s.g);
    let ops = c.sm.ops();
    let lhs = ops.apply(Op::Bc(&g), &c.mu_usn(&s.x)).plus(&c.mu_usn(&ops.apply(Op::Bc(&g), &s.x)));
    compare_chains(lhs, c.e_u(&s.g, &s.x).neg())
}

fn homotopy_connection(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let ix = c.i(&s.x);
    let nabla = ix.nabla_u(&c.f, &[]).minus(&ix.gamma().times_u(-1).scaled(&Rational::new(1, 2)));
    let lhs = nabla.minus(&c.i(&c.sm.ops().nabla_u(&[], &s.x)));
    let hx = c.h(&s.x);
    let rhs = hx.wedge_d(&c.f).neg().plus(&hx.d().times_u(1)).plus(&c.h(&c.b_u(&s.x)));
    compare_forms(lhs.times_u(2).scaled(&Rational::from(2i64)), rhs)
}

fn homotopy_central(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let g = c.g_elem(&s.g);
    let lhs = c.h(&s.x).wedge_d(&s.g).neg().plus(&c.h(&c.sm.ops().apply(Op::Bc(&g), &s.x)));
    compare_forms(lhs, Form::zero()).map(|_| !c.h(&s.x).is_zero())
}

fn central_connection(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let two = Rational::from(2i64);
    let lhs = c.i(&s.x).mul_poly(&s.g).minus(&c.i(&c.e_u(&s.g, &s.x))).scaled(&two);
    let g2 = c.g_elem(&s.g2);
    let gd = c.gdi(&s.g, &s.x);
    let mut rhs = gd.wedge_d(&c.f).plus(&gd.wedge_d(&s.g2)).minus(&gd.d().times_u(1));
    let shifted = c.b_u(&s.x).plus(&c.sm.ops().apply(Op::Bc(&g2), &s.x));
    rhs = rhs.minus(&c.gdi(&s.g, &shifted));
    compare_forms(lhs, rhs)
}

fn big_e_term(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    let g = c.g_elem(&s.g);
    let lhs = c.i(&c.sm.ops().apply(Op::BigEc(&g), &s.x)).times_u(1).scaled(&Rational::from(2i64));
    let gd = c.gdi(&s.g, &s.x);
    let rhs = gd.wedge_d(&c.f).neg().plus(&gd.d().times_u(1)).plus(&c.gdi(&s.g, &c.b_u(&s.x)));
    compare_forms(lhs, rhs)
}

fn exp_truncation(c: &BridgeCtx<'_, '_>, s: &BridgeSample) -> Probe {
    compare_forms(c.sm.truncation_defect(&s.x), Form::zero()).map(|_| !c.i(&s.x).is_zero())
}

/// The bridge identities, by name.
pub fn bridge_registry() -> Vec<BridgeCheck> {
    vec![
        BridgeCheck { name: "if-b", anchor: "I_f b = -df I_f", run: if_b },
        BridgeCheck { name: "if-connes", anchor: "I_f B = d I_f", run: if_connes },
        BridgeCheck { name: "if-bg", anchor: "I_f b(g) = -dg I_f", run: if_bg },
        BridgeCheck { name: "bd-bg", anchor: "b(D_f) b(g) = b(g) b(D_f)", run: bd_bg },
        BridgeCheck { name: "str-bg", anchor: "str b(g) = b(g) str", run: str_bg },
        BridgeCheck { name: "eps-bg", anchor: "eps b(g) = -dg eps", run: eps_bg },
        BridgeCheck { name: "bd-eg", anchor: "[b(D_f), e(g) + uE(g)] = 0", run: bd_eg },
        BridgeCheck { name: "str-eg", anchor: "[str, e(g) + uE(g)] = 0", run: str_eg },
        BridgeCheck { name: "eps-eg", anchor: "eps e(g) = g eps", run: eps_eg },
        BridgeCheck { name: "bg-mu-sn", anchor: "[b(g), mu0 + usN'] = -(e(g) + uE(g))", run: bg_mu_sn },
        BridgeCheck {
            name: "homotopy-connection",
            anchor: "(nabla^f - gamma/2u) I_f - I_f nabla^A = (-df + ud) H/2u^2 + H/2u^2 (b + uB), H with +f d I_f",
            run: homotopy_connection,
        },
        BridgeCheck { name: "homotopy-central", anchor: "-dg H/2u^2 + H/2u^2 b(g) = 0", run: homotopy_central },
        BridgeCheck {
            name: "central-connection",
            anchor: "(g/u^2) I_f - I_f (e(g) + uE(g))/u^2 = (-df - dg' + ud)(g d I_f/2u^2) + (g d I_f/2u^2)(b + b(g') + uB)",
            run: central_connection,
        },
        BridgeCheck {
            name: "big-e-term",
            anchor: "2u I_f E(g) = -(-df + ud) g d I_f - g d I_f (b + uB)",
            run: big_e_term,
        },
        BridgeCheck { name: "exp-truncation", anchor: "eps str of exp(-b(D_f)) beyond length n = 0", run: exp_truncation },
    ]
}

fn coefficient<R: Rng>(rng: &mut R) -> Rational {
    Rational::from([-2i64, -1, 1, 2][rng.random_range(0..4)])
}

fn random_monomial<R: Rng>(rng: &mut R, n: usize, min_deg: u32, max_deg: u32) -> Exponent {
    let deg = rng.random_range(min_deg..=max_deg);
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[rng.random_range(0..n)] += 1;
    }
    e
}

/// Draws one sample: a chain over `A_f`, a chain over the polynomial ring and
/// two monomials.
pub fn draw_bridge_sample<R: Rng>(rng: &mut R, sm: &SegalMap<'_>, pool: &[MfBasis], spec: &BridgeSpec) -> BridgeSample {
    let n = sm.n();
    let a = sm.algebra();
    let max_len = spec.max_len.unwrap_or(n + 1);
    let nonunit: Vec<&MfBasis> = pool.iter().filter(|b| !a.is_unit(b)).collect();
    let mut x = Chain::zero();
    let mut p = Chain::zero();
    for _ in 0..spec.spread.max(1) {
        let l = rng.random_range(0..=max_len);
        let mut t = vec![pool[rng.random_range(0..pool.len())].clone()];
        for _ in 0..l {
            t.push(nonunit[rng.random_range(0..nonunit.len())].clone());
        }
        let m = Mono::u(rng.random_range(0..=1));
        x.add_term(m.clone(), t, coefficient(rng));
        let lp = rng.random_range(0..=n);
        let mut tp = vec![random_monomial(rng, n, 0, 2)];
        for _ in 0..lp {
            tp.push(random_monomial(rng, n, 1, 2));
        }
        p.add_term(m, tp, coefficient(rng));
    }
    let g = WPoly::monomial(random_monomial(rng, n, 1, 2));
    let g2 = WPoly::monomial(random_monomial(rng, n, 1, 2));
    BridgeSample { x, p, g, g2 }
}

/// Basis elements of `A_f` with weights in the sampling range.
pub fn bridge_pool(sm: &SegalMap<'_>, spec: &BridgeSpec) -> Vec<MfBasis> {
    let a = sm.algebra();
    let e = a.endp();
    let wmin = (0..e.dim()).map(|t| e.weight(t, a.theta_weights())).min().unwrap_or(0);
    (wmin..=wmin + spec.weight_range).flat_map(|w| a.basis_of_weight(w)).collect()
}

/// Runs every registered bridge identity on `spec.samples` random samples.
pub fn bridge_identity_checks(name: &str, sm: &SegalMap<'_>, seed: u64, spec: &BridgeSpec) -> SuiteReport {
    let ctx = BridgeCtx { sm, f: sm.algebra().f().clone() };
    let pool = bridge_pool(sm, spec);
    let samples: Vec<BridgeSample> = (0..spec.samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            draw_bridge_sample(&mut rng, sm, &pool, spec)
        })
        .collect();
    let a = sm.algebra();
    let results: Vec<IdentityResult> = bridge_registry()
        .iter()
        .map(|chk| {
            run_parallel(chk.name, chk.anchor, samples.len(), |i| {
                let s = &samples[i];
                (chk.run)(&ctx, s).map_err(|w| {
                    format!("x = {}, g = {}, g' = {}: {w}", show_chain(a, &s.x, 6), s.g, s.g2)
                })
            })
        })
        .collect();
    SuiteReport { algebra: name.to_string(), results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::MfAlgebra;
    use crate::poly::WeightSystem;

    fn mf(f: WPoly, w: Vec<i64>, total: i64) -> MfAlgebra {
        MfAlgebra::new(&f, &WeightSystem::new(w, total).unwrap(), None).unwrap()
    }

    fn report_ok(r: &SuiteReport) {
        for res in &r.results {
            assert!(res.passed(), "{}: {:?}", res.name, res.witness);
        }
    }

    #[test]
    fn quadric_bridge_identities() {
        let a = mf(WPoly::monomial(vec![2]), vec![1], 2);
        let sm = SegalMap::new(&a);
        let spec = BridgeSpec { samples: 30, ..BridgeSpec::default() };
        let r = bridge_identity_checks("x2", &sm, 3, &spec);
        report_ok(&r);
    }

    #[test]
    fn corrupted_epsilon_is_caught() {
        let a = mf(WPoly::monomial(vec![2]), vec![1], 2);
        let sm = SegalMap::with_corrupted_epsilon(&a);
        let spec = BridgeSpec { samples: 20, ..BridgeSpec::default() };
        let r = bridge_identity_checks("x2-corrupt", &sm, 5, &spec);
        let eps = r.results.iter().find(|x| x.name == "eps-bg").unwrap();
        assert!(!eps.passed());
        assert!(eps.witness.is_some());
    }
}
