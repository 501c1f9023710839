//! Randomized exact identity suite for the operators on `C_*(A)`.
//!
//! Every identity is a trait object in a registry keyed by name. A check
//! receives a random sample and returns `Err(witness)` when the residual of
//! the identity is nonzero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::chain::{Bar, BarLin, Chain, Mono};
use super::ops::{BarOps, Op};
use super::product::{cyclic_sh, phi_chain, sh, shuffle_words, PairChain};
use crate::dga::{Elem, Opposite, SuperAlgebra, Tensor};
use crate::exact::{Lin, Rational};

pub type Check = Result<(), String>;

/// Everything an identity needs: the algebra, its operators and its centrals.
pub struct SuiteCtx<'a, A: SuperAlgebra> {
    pub a: &'a A,
    pub ops: BarOps<'a, A>,
    pub centrals: Vec<Elem<A::Basis>>,
}

/// One random sample: two chains and a raw tensor used by the
/// per-index commutation rules.
#[derive(Clone, Debug)]
pub struct Sample<B: Ord> {
    pub x: Chain<B>,
    pub y: Chain<B>,
    pub t: Bar<B>,
}

pub trait Identity<A: SuperAlgebra>: Send + Sync {
    fn name(&self) -> &'static str;
    /// The identity written out as a formula.
    fn anchor(&self) -> &'static str;
    fn check(&self, cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check;
}

struct Named<A: SuperAlgebra> {
    name: &'static str,
    anchor: &'static str,
    run: fn(&SuiteCtx<'_, A>, &Sample<A::Basis>) -> Check,
}

impl<A: SuperAlgebra> Identity<A> for Named<A> {
    fn name(&self) -> &'static str {
        self.name
    }
    fn anchor(&self) -> &'static str {
        self.anchor
    }
    fn check(&self, cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
        (self.run)(cx, s)
    }
}

fn named<'r, A: SuperAlgebra + 'r>(
    name: &'static str,
    anchor: &'static str,
    run: fn(&SuiteCtx<'_, A>, &Sample<A::Basis>) -> Check,
) -> Box<dyn Identity<A> + 'r> {
    Box::new(Named { name, anchor, run })
}

/// Renders a chain with the algebra's basis labels, at most `limit` terms.
pub fn show_chain<A: SuperAlgebra>(a: &A, x: &Chain<A::Basis>, limit: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut parts: Vec<String> = x
        .iter()
        .take(limit)
        .map(|(m, t, c)| {
            let slots: Vec<String> = t[1..].iter().map(|b| a.label(b)).collect();
            format!("({c})*{m}*{}[{}]", a.label(&t[0]), slots.join("|"))
        })
        .collect();
    if x.len() > limit {
        parts.push(format!("... ({} terms)", x.len()));
    }
    parts.join(" + ")
}

fn zero<A: SuperAlgebra>(a: &A, input: &Chain<A::Basis>, r: &Chain<A::Basis>) -> Check {
    if r.is_zero() {
        Ok(())
    } else {
        Err(format!("input {} ; residual {}", show_chain(a, input, 4), show_chain(a, r, 4)))
    }
}

fn zero_lin<A: SuperAlgebra>(a: &A, input: &Bar<A::Basis>, what: &str, r: &BarLin<A::Basis>) -> Check {
    if r.is_zero() {
        Ok(())
    } else {
        let c = Chain::from_lin(&Mono::one(), r);
        Err(format!("{what} on {} ; residual {}", show_chain(a, &Chain::tensor(input.clone()), 1), show_chain(a, &c, 4)))
    }
}

fn chain_parity<A: SuperAlgebra>(ops: &BarOps<'_, A>, t: &Bar<A::Basis>) -> usize {
    ops.tensor_parity(t)
}

/// `XY - YX` for even `X`, evaluated on `x`.
fn commutator<B: Ord + Clone>(
    f: impl Fn(&Chain<B>) -> Chain<B>,
    g: impl Fn(&Chain<B>) -> Chain<B>,
    x: &Chain<B>,
) -> Chain<B> {
    f(&g(x)).minus(&g(&f(x)))
}

// ---- differentials ----

fn b_squared<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    zero(cx.a, &s.x, &o.apply(Op::B, &o.apply(Op::B, &s.x)))
}

fn connes_squared<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    zero(cx.a, &s.x, &o.apply(Op::Connes, &o.apply(Op::Connes, &s.x)))
}

fn b_connes_anticommute<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let r = o.apply(Op::B, &o.apply(Op::Connes, &s.x)).plus(&o.apply(Op::Connes, &o.apply(Op::B, &s.x)));
    zero(cx.a, &s.x, &r)
}

fn delta_squared<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let d = |x: &Chain<A::Basis>| cx.ops.delta_total(&cx.centrals, x);
    zero(cx.a, &s.x, &d(&d(&s.x)))
}

// ---- Cartan-type formulas ----

fn cartan_delta<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let ee = |x: &Chain<A::Basis>| o.apply(Op::EDelta, x).plus(&o.apply(Op::BigEDelta, x).times_u(1));
    let r = commutator(ee, |x| o.b_plus_ub(x), &s.x).minus(&o.apply(Op::BDelta, &s.x).times_u(1));
    zero(cx.a, &s.x, &r)
}

fn cartan_central<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    for c in &cx.centrals {
        let ee = |x: &Chain<A::Basis>| o.apply(Op::Ec(c), x).plus(&o.apply(Op::BigEc(c), x).times_u(1));
        let r = commutator(ee, |x| o.b_plus_ub(x), &s.x).minus(&o.apply(Op::Bc(c), &s.x).times_u(1));
        zero(cx.a, &s.x, &r)?;
    }
    Ok(())
}

fn delta_insertion_commute<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let ee = |x: &Chain<A::Basis>| o.apply(Op::EDelta, x).plus(&o.apply(Op::BigEDelta, x).times_u(1));
    for c in &cx.centrals {
        let r = commutator(ee, |x| o.apply(Op::Bc(c), x), &s.x);
        zero(cx.a, &s.x, &r)?;
    }
    Ok(())
}

fn central_insertion_commute<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    for c in &cx.centrals {
        let ee = |x: &Chain<A::Basis>| o.apply(Op::Ec(c), x).plus(&o.apply(Op::BigEc(c), x).times_u(1));
        for c2 in &cx.centrals {
            let r = commutator(ee, |x| o.apply(Op::Bc(c2), x), &s.x);
            zero(cx.a, &s.x, &r)?;
        }
    }
    Ok(())
}

// ---- commutation rules on raw tensors ----

fn rule_delta_c<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let l = s.t.len() - 1;
    for c in &cx.centrals {
        for j in 1..=l + 1 {
            let cj = o.c_i_raw(c, &s.t, j);
            for i in 0..=l + 1 {
                let lhs = o.lin(&cj, |t| o.delta_i_raw(t, i));
                let rhs = if i == j {
                    Lin::new()
                } else {
                    let k = if i > j { i - 1 } else { i };
                    o.lin(&o.delta_i_raw(&s.t, k), |t| o.c_i_raw(c, t, j)).neg()
                };
                zero_lin(cx.a, &s.t, &format!("delta({i}) c({j})"), &lhs.minus(&rhs))?;
            }
        }
    }
    Ok(())
}

fn rule_c_c<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let l = s.t.len() - 1;
    for c in &cx.centrals {
        for c2 in &cx.centrals {
            for j in 1..=l + 1 {
                let c2j = o.c_i_raw(c2, &s.t, j);
                for i in 1..=l + 2 {
                    let lhs = o.lin(&c2j, |t| o.c_i_raw(c, t, i));
                    let rhs = if i > j {
                        o.lin(&o.c_i_raw(c, &s.t, i - 1), |t| o.c_i_raw(c2, t, j))
                    } else {
                        o.lin(&o.c_i_raw(c, &s.t, i), |t| o.c_i_raw(c2, t, j + 1))
                    };
                    zero_lin(cx.a, &s.t, &format!("c({i}) c'({j})"), &lhs.plus(&rhs))?;
                }
            }
        }
    }
    Ok(())
}

fn rule_c_mu<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let l = s.t.len() - 1;
    if l == 0 {
        return Ok(());
    }
    for c in &cx.centrals {
        let m = o.mu0_raw(&s.t);
        for i in 1..=l {
            let lhs = o.lin(&m, |t| o.c_i_raw(c, t, i));
            let rhs = o.lin(&o.c_i_raw(c, &s.t, i + 1), |t| o.mu0_raw(t));
            zero_lin(cx.a, &s.t, &format!("c({i}) mu(0)"), &lhs.plus(&rhs))?;
        }
    }
    Ok(())
}

fn rule_s_c<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let l = s.t.len() - 1;
    for c in &cx.centrals {
        for i in 1..=l + 1 {
            let lhs = o.c_i_raw(c, &s.t, i).map_keys(|t| o.s_raw(t));
            let rhs = o.c_i_raw(c, &o.s_raw(&s.t), i + 1);
            zero_lin(cx.a, &s.t, &format!("s c({i})"), &lhs.plus(&rhs))?;
        }
    }
    Ok(())
}

// ---- connections ----

fn u_connection<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let d = |x: &Chain<A::Basis>| o.delta_total(&cx.centrals, x);
    let n = |x: &Chain<A::Basis>| o.nabla_u(&cx.centrals, x);
    let mut r = commutator(n, d, &s.x);
    r.add_scaled(&d(&s.x).times_u(-1), &Rational::new(-1, 2));
    zero(cx.a, &s.x, &r)
}

fn z_connection<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let d = |x: &Chain<A::Basis>| o.delta_total(&cx.centrals, x);
    for i in 0..cx.centrals.len() {
        let r = commutator(|x| o.nabla_z(&cx.centrals, i, x), d, &s.x);
        zero(cx.a, &s.x, &r)?;
    }
    Ok(())
}

// ---- homotopies ----

fn homotopy_cc<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let d = |x: &Chain<A::Basis>| o.delta_total(&cx.centrals, x);
    for c in &cx.centrals {
        for c2 in &cx.centrals {
            let x = &s.x;
            let mut lhs = commutator(|y| o.apply(Op::Ec(c), y), |y| o.apply(Op::BigEc(c2), y), x);
            lhs.add(&commutator(|y| o.apply(Op::BigEc(c), y), |y| o.apply(Op::Ec(c2), y), x));
            lhs.add(&o.apply(Op::Bc(c), &o.apply(Op::Bc(c2), x)));
            let h = |y: &Chain<A::Basis>| o.apply(Op::Hcc(c, c2), y);
            let rhs = d(&h(x)).plus(&h(&d(x)));
            zero(cx.a, x, &lhs.minus(&rhs))?;
        }
    }
    Ok(())
}

fn homotopy_c_delta<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let d = |x: &Chain<A::Basis>| o.delta_total(&cx.centrals, x);
    for c in &cx.centrals {
        let x = &s.x;
        let mut lhs = commutator(|y| o.apply(Op::EDelta, y), |y| o.apply(Op::BigEc(c), y), x);
        lhs.add(&commutator(|y| o.apply(Op::BigEDelta, y), |y| o.apply(Op::Ec(c), y), x));
        lhs.add(&o.apply(Op::BDelta, &o.apply(Op::Bc(c), x)));
        let h = |y: &Chain<A::Basis>| o.apply(Op::Hc(c), y);
        let rhs = d(&h(x)).plus(&h(&d(x)));
        zero(cx.a, x, &lhs.minus(&rhs))?;
    }
    Ok(())
}

fn homotopy_reversal<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let x = &s.x;
    let d = |y: &Chain<A::Basis>| o.delta_total(&cx.centrals, y);
    let h = |y: &Chain<A::Basis>| o.apply(Op::HPhi, y);
    let lhs = o
        .apply(Op::EDelta, x)
        .minus(&o.apply(Op::TildeEDelta, x))
        .plus(&o.apply(Op::BigEDelta, x).minus(&o.apply(Op::TildeBigEDelta, x)).times_u(1));
    let rhs = d(&h(x)).plus(&h(&d(x)));
    zero(cx.a, x, &lhs.minus(&rhs))
}

fn homotopy_reversal_central<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let o = &cx.ops;
    let h = |y: &Chain<A::Basis>| o.apply(Op::HPhi, y);
    for c in &cx.centrals {
        let bc = |y: &Chain<A::Basis>| o.apply(Op::Bc(c), y);
        zero(cx.a, &s.x, &bc(&h(&s.x)).plus(&h(&bc(&s.x))))?;
    }
    Ok(())
}

// ---- reversal into the opposite algebra ----

/// Checks `Phi X = sign * Y^op Phi` on the sample.
fn reversal_rel<A: SuperAlgebra>(
    cx: &SuiteCtx<'_, A>,
    s: &Sample<A::Basis>,
    sign: i64,
    mut pick: impl FnMut(&BarOps<'_, A>, &BarOps<'_, Opposite<'_, A>>, &Chain<A::Basis>, bool) -> Chain<A::Basis>,
) -> Check {
    let opp = Opposite(cx.a);
    let oo = BarOps::new(&opp);
    let lhs = phi_chain(cx.a, &pick(&cx.ops, &oo, &s.x, false));
    let rhs = pick(&cx.ops, &oo, &phi_chain(cx.a, &s.x), true).scaled(&Rational::from(sign));
    zero(cx.a, &s.x, &lhs.minus(&rhs))
}

fn reversal_b<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    reversal_rel(cx, s, 1, |o, oo, x, op| if op { oo.apply(Op::B, x) } else { o.apply(Op::B, x) })
}

fn reversal_connes<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    reversal_rel(cx, s, -1, |o, oo, x, op| if op { oo.apply(Op::Connes, x) } else { o.apply(Op::Connes, x) })
}

fn reversal_bc<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    for c in &cx.centrals {
        reversal_rel(cx, s, -1, |o, oo, x, op| if op { oo.apply(Op::Bc(c), x) } else { o.apply(Op::Bc(c), x) })?;
    }
    Ok(())
}

fn reversal_ec<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    for c in &cx.centrals {
        reversal_rel(cx, s, 1, |o, oo, x, op| if op { oo.apply(Op::Ec(c), x) } else { o.apply(Op::Ec(c), x) })?;
    }
    Ok(())
}

fn reversal_big_ec<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    for c in &cx.centrals {
        reversal_rel(cx, s, -1, |o, oo, x, op| {
            if op {
                oo.apply(Op::TildeBigEc(c), x)
            } else {
                o.apply(Op::BigEc(c), x)
            }
        })?;
    }
    Ok(())
}

// ---- shuffle products ----

type PB<A> = (<A as SuperAlgebra>::Basis, <A as SuperAlgebra>::Basis);

/// `(sh + u Sh)` applied to a pair chain, normalized in `A (x) A`.
fn shuffle_total<A: SuperAlgebra>(a: &A, p: &PairChain<A::Basis, A::Basis>, with_cyclic: bool) -> Chain<PB<A>> {
    let t = Tensor(a, a);
    let ops = BarOps::new(&t);
    let mut out = p.to_chain(|x, y| sh(a, a, x, y));
    if with_cyclic {
        out.add(&p.to_chain(|x, y| ops.normalize(cyclic_sh(a, a, x, y))).times_u(1));
    }
    out
}

fn cyclic_only<A: SuperAlgebra>(a: &A, p: &PairChain<A::Basis, A::Basis>) -> Chain<PB<A>> {
    let t = Tensor(a, a);
    let ops = BarOps::new(&t);
    p.to_chain(|x, y| ops.normalize(cyclic_sh(a, a, x, y)))
}

fn zero_pair<A: SuperAlgebra>(a: &A, s: &Sample<A::Basis>, r: &Chain<PB<A>>) -> Check {
    if r.is_zero() {
        Ok(())
    } else {
        let t = Tensor(a, a);
        Err(format!(
            "input {} (x) {} ; residual {}",
            show_chain(a, &s.x, 2),
            show_chain(a, &s.y, 2),
            show_chain(&t, r, 4)
        ))
    }
}

fn shuffle_chain_map<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let a = cx.a;
    let t = Tensor(a, a);
    let tops = BarOps::new(&t);
    let o = &cx.ops;
    let p = PairChain::product(&s.x, &s.y);
    let lhs = tops.b_plus_ub(&shuffle_total(a, &p, true));
    let dp = p.left(|x| o.b_plus_ub(x)).plus(&p.right(1, |t| chain_parity(o, t), |y| o.b_plus_ub(y)));
    let rhs = shuffle_total(a, &dp, true);
    zero_pair(a, s, &lhs.minus(&rhs))
}

fn shuffle_central<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>, cyclic: bool) -> Check {
    let a = cx.a;
    let t = Tensor(a, a);
    let tops = BarOps::new(&t);
    let o = &cx.ops;
    let p = PairChain::product(&s.x, &s.y);
    let shf = |q: &PairChain<A::Basis, A::Basis>| {
        if cyclic {
            cyclic_only(a, q)
        } else {
            shuffle_total(a, q, false)
        }
    };
    for c in &cx.centrals {
        let cl: Elem<PB<A>> = c.map_keys(|b| (b.clone(), a.unit()));
        let cr: Elem<PB<A>> = c.map_keys(|b| (a.unit(), b.clone()));
        let lhs = shf(&p.left(|x| o.apply(Op::Bc(c), x)));
        let rhs = tops.apply(Op::Bc(&cl), &shf(&p));
        zero_pair(a, s, &lhs.minus(&rhs))?;
        let lhs = shf(&p.right(1, |t| chain_parity(o, t), |y| o.apply(Op::Bc(c), y)));
        let rhs = tops.apply(Op::Bc(&cr), &shf(&p));
        zero_pair(a, s, &lhs.minus(&rhs))?;
    }
    Ok(())
}

fn shuffle_central_sh<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    shuffle_central(cx, s, false)
}

fn shuffle_central_cyclic<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    shuffle_central(cx, s, true)
}

/// Letters for the shuffle decompositions: odd `x`s from the sample's slots
/// (or `a0` when odd), arbitrary `y`s from the second sample.
fn letters<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let first = s.x.iter().next().map(|(_, t, _)| t.clone()).unwrap_or_else(|| s.t.clone());
    let second = s.y.iter().next().map(|(_, t, _)| t.clone()).unwrap_or_else(|| s.t.clone());
    let xs: Vec<(usize, usize)> = first
        .iter()
        .filter(|b| cx.a.parity(b) == 1)
        .enumerate()
        .map(|(i, _)| (i, 1))
        .collect();
    let ys: Vec<(usize, usize)> =
        second.iter().enumerate().map(|(j, b)| (100 + j, cx.a.parity(b) as usize)).collect();
    (xs, ys)
}

fn concat3(a: &Lin<Vec<usize>>, mid: usize, b: &Lin<Vec<usize>>) -> Lin<Vec<usize>> {
    let mut out = Lin::new();
    for (u, c) in a {
        for (v, d) in b {
            let mut w = u.clone();
            w.push(mid);
            w.extend(v.iter().copied());
            out.add(w, c * d);
        }
    }
    out
}

fn decomp_check(lhs: Lin<Vec<usize>>, rhs: Lin<Vec<usize>>, what: &str) -> Check {
    let r = lhs.minus(&rhs);
    if r.is_zero() {
        Ok(())
    } else {
        Err(format!("{what}: {} residual words", r.len()))
    }
}

fn shuffle_decomp_right<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let (xs, ys) = letters(cx, s);
    for k in 0..ys.len() {
        let lhs = shuffle_words(&xs, &ys);
        let mut rhs = Lin::new();
        for r in 0..=xs.len() {
            let left = shuffle_words(&xs[..r], &ys[..k]);
            let right = shuffle_words(&xs[r..], &ys[k + 1..]);
            rhs.add_lin(&concat3(&left, ys[k].0, &right));
        }
        decomp_check(lhs, rhs, &format!("split at y{k}"))?;
    }
    Ok(())
}

fn shuffle_decomp_left<A: SuperAlgebra>(cx: &SuiteCtx<'_, A>, s: &Sample<A::Basis>) -> Check {
    let (xs, ys) = letters(cx, s);
    for k in 0..ys.len() {
        let lhs = shuffle_words(&ys, &xs);
        let mut rhs = Lin::new();
        for r in 0..=xs.len() {
            let left = shuffle_words(&ys[..k], &xs[..r]);
            let right = shuffle_words(&ys[k + 1..], &xs[r..]);
            rhs.add_lin(&concat3(&left, ys[k].0, &right));
        }
        decomp_check(lhs, rhs, &format!("split at y{k}"))?;
    }
    Ok(())
}

/// All identities, in report order.
pub fn registry<'r, A: SuperAlgebra + 'r>() -> Vec<Box<dyn Identity<A> + 'r>> {
    vec![
        named("b-squared", "b^2 = 0", b_squared),
        named("connes-squared", "B^2 = 0", connes_squared),
        named("b-connes-anticommute", "bB + Bb = 0", b_connes_anticommute),
        named("delta-squared", "Delta^2 = 0, Delta = b + sum z_j b(c_j) + uB", delta_squared),
        named("cartan-delta", "[e(delta) + uE(delta), b + uB] = u b(delta)", cartan_delta),
        named("cartan-central", "[e(c) + uE(c), b + uB] = u b(c)", cartan_central),
        named("delta-insertion-commute", "[e(delta) + uE(delta), b(c)] = 0", delta_insertion_commute),
        named("central-insertion-commute", "[e(c) + uE(c), b(c')] = 0", central_insertion_commute),
        named(
            "rule-delta-c",
            "delta(i) c(j) = -c(j) delta(i-1) (i>j), 0 (i=j), -c(j) delta(i) (i<j)",
            rule_delta_c,
        ),
        named("rule-c-c", "c(i) c'(j) = -c'(j) c(i-1) (i>j), -c'(j+1) c(i) (i<=j)", rule_c_c),
        named("rule-c-mu", "c(i) mu(0) = -mu(0) c(i+1), i >= 1", rule_c_mu),
        named("rule-s-c", "s c(i) = -c(i+1) s", rule_s_c),
        named("u-connection", "[nabla_u, Delta] = Delta / 2u", u_connection),
        named("z-connection", "[nabla_{z_i}, Delta] = 0", z_connection),
        named(
            "homotopy-central-pair",
            "[e(c),E(c')] + [E(c),e(c')] + b(c)b(c') = Delta H(c,c') + H(c,c') Delta",
            homotopy_cc,
        ),
        named(
            "homotopy-central-delta",
            "[e(delta),E(c)] + [E(delta),e(c)] + b(delta)b(c) = Delta H(c) + H(c) Delta",
            homotopy_c_delta,
        ),
        named(
            "homotopy-reversal",
            "(e(delta) - e~(delta)) + u(E(delta) - E~(delta)) = Delta H + H Delta, H = delta(0)(1 - N)",
            homotopy_reversal,
        ),
        named("homotopy-reversal-central", "b(c) H + H b(c) = 0, H = delta(0)(1 - N)", homotopy_reversal_central),
        named("reversal-b", "Phi b = b Phi", reversal_b),
        named("reversal-connes", "Phi B = -B Phi", reversal_connes),
        named("reversal-bc", "Phi b(c) = -b(c) Phi", reversal_bc),
        named("reversal-ec", "Phi e(c) = e(c) Phi", reversal_ec),
        named("reversal-big-ec", "Phi E(c) = -E~(c) Phi, E~(c) = E(c) + B b(c)", reversal_big_ec),
        named(
            "shuffle-chain-map",
            "(b + uB)(sh + uSh) = (sh + uSh)((b + uB) (x) 1 + 1 (x) (b + uB))",
            shuffle_chain_map,
        ),
        named("shuffle-central", "sh (b(c) (x) 1) = b(c (x) 1) sh, sh (1 (x) b(c)) = b(1 (x) c) sh", shuffle_central_sh),
        named(
            "cyclic-shuffle-central",
            "Sh (b(c) (x) 1) = b(c (x) 1) Sh, Sh (1 (x) b(c)) = b(1 (x) c) Sh",
            shuffle_central_cyclic,
        ),
        named("shuffle-split-right", "sh{x}{y..|y|..} = sum_r sh{x<r}{y<k} | y | sh{x>=r}{y>=k}, x odd", shuffle_decomp_right),
        named("shuffle-split-left", "sh{y..|y|..}{x} = sum_r sh{y<k}{x<r} | y | sh{y>=k}{x>=r}, x odd", shuffle_decomp_left),
    ]
}

/// Sampling parameters.
#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub samples: usize,
    pub max_length: usize,
    pub min_u: i32,
    pub max_u: i32,
    /// Maximal length of the second factor of pair identities.
    pub max_pair_length: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { samples: 200, max_length: 6, min_u: -2, max_u: 2, max_pair_length: 3 }
    }
}

pub(crate) fn random_tensor<B: Clone>(rng: &mut ChaCha8Rng, basis: &[B], nonunit: &[B], len: usize) -> Bar<B> {
    let mut t = Vec::with_capacity(len + 1);
    t.push(basis[rng.random_range(0..basis.len())].clone());
    for _ in 0..len {
        t.push(nonunit[rng.random_range(0..nonunit.len())].clone());
    }
    t
}

pub(crate) fn random_mono(rng: &mut ChaCha8Rng, spec: &SampleSpec, nz: usize) -> Mono {
    let mut m = Mono::u(rng.random_range(spec.min_u..=spec.max_u));
    for j in 0..nz {
        if rng.random_bool(0.3) {
            m = m.with_z(j, 1);
        }
    }
    m
}

/// Draws `spec.samples` samples. The first chain is a single random basis
/// tensor of length `0..=max_length` with a random coefficient monomial.
pub fn draw_samples<A: SuperAlgebra>(
    a: &A,
    basis: &[A::Basis],
    nz: usize,
    seed: u64,
    spec: &SampleSpec,
) -> Vec<Sample<A::Basis>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nonunit: Vec<A::Basis> = basis.iter().filter(|b| !a.is_unit(b)).cloned().collect();
    (0..spec.samples)
        .map(|_| {
            let l = rng.random_range(0..=spec.max_length);
            let t = random_tensor(&mut rng, basis, &nonunit, l);
            let c = Rational::from(rng.random_range(1..=3i64));
            let x = Chain::term(random_mono(&mut rng, spec, nz), t.clone(), c);
            let l2 = rng.random_range(0..=spec.max_pair_length.min(spec.max_length));
            let t2 = random_tensor(&mut rng, basis, &nonunit, l2);
            let y = Chain::term(random_mono(&mut rng, spec, 0), t2, Rational::one());
            Sample { x, y, t }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityResult {
    pub name: String,
    pub anchor: String,
    pub samples: usize,
    pub failures: usize,
    pub witness: Option<String>,
    /// Passing samples on which the compared sides were nonzero, when tracked.
    pub nontrivial: Option<usize>,
}

impl IdentityResult {
    pub fn new(name: &str, anchor: &str) -> Self {
        IdentityResult { name: name.into(), anchor: anchor.into(), samples: 0, failures: 0, witness: None, nontrivial: None }
    }

    /// Counts one sample, keeping the first failure as witness.
    pub fn record(&mut self, outcome: Check) {
        self.samples += 1;
        if let Err(w) = outcome {
            self.failures += 1;
            self.witness.get_or_insert(w);
        }
    }

    /// Like [`Self::record`], also counting samples with nonzero sides.
    pub fn record_probe(&mut self, outcome: Result<bool, String>) {
        let n = self.nontrivial.get_or_insert(0);
        if outcome == Ok(true) {
            *n += 1;
        }
        self.record(outcome.map(|_| ()));
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub algebra: String,
    pub results: Vec<IdentityResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed())
    }

    pub fn failed(&self) -> Vec<&IdentityResult> {
        self.results.iter().filter(|r| !r.passed()).collect()
    }
}

/// Pair identities are the expensive ones; they run on a fixed fraction of
/// the samples.
fn is_pair_identity(name: &str) -> bool {
    matches!(name, "shuffle-chain-map" | "shuffle-central" | "cyclic-shuffle-central")
}

/// Runs every registered identity on the samples, in parallel over samples.
pub fn run_identity_suite<A: SuperAlgebra>(
    name: &str,
    cx: &SuiteCtx<'_, A>,
    samples: &[Sample<A::Basis>],
) -> SuiteReport {
    let ids = registry::<A>();
    let results = ids
        .iter()
        .map(|id| {
            let pair = is_pair_identity(id.name());
            let outcomes: Vec<Check> = samples
                .par_iter()
                .enumerate()
                .filter(|(k, _)| !pair || k % 4 == 0)
                .map(|(_, s)| id.check(cx, s))
                .collect();
            let failures = outcomes.iter().filter(|o| o.is_err()).count();
            let witness = outcomes.into_iter().find_map(|o| o.err());
            IdentityResult {
                name: id.name().to_string(),
                anchor: id.anchor().to_string(),
                samples: if pair { samples.len().div_ceil(4) } else { samples.len() },
                failures,
                witness,
                nontrivial: None,
            }
        })
        .collect();
    SuiteReport { algebra: name.to_string(), results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::FiniteDga;

    fn run(a: &FiniteDga, n: usize, seed: u64, max_length: usize) -> SuiteReport {
        let cx = SuiteCtx { a, ops: BarOps::new(a), centrals: a.centrals().iter().map(|c| c.elem.clone()).collect() };
        let spec = SampleSpec { samples: n, max_length, ..Default::default() };
        let samples = draw_samples(a, &a.basis(), cx.centrals.len(), seed, &spec);
        run_identity_suite(&a.name, &cx, &samples)
    }

    fn assert_all(r: &SuiteReport) {
        for f in r.failed() {
            panic!("{}: {} failed {}/{}: {:?}", r.algebra, f.name, f.failures, f.samples, f.witness);
        }
    }

    #[test]
    fn exterior_algebra_passes() {
        assert_all(&run(&FiniteDga::exterior(2), 24, 1, 4));
    }

    #[test]
    fn dual_koszul_passes() {
        assert_all(&run(&FiniteDga::dual_numbers_koszul(), 24, 2, 4));
    }

    #[test]
    fn corrupted_tau_breaks_b_squared() {
        let a = FiniteDga::exterior(2);
        let cx = SuiteCtx { a: &a, ops: BarOps::with_corrupted_tau(&a), centrals: a.centrals().iter().map(|c| c.elem.clone()).collect() };
        let spec = SampleSpec { samples: 40, max_length: 4, ..Default::default() };
        let samples = draw_samples(&a, &a.basis(), 1, 3, &spec);
        let r = run_identity_suite("corrupt", &cx, &samples);
        let b2 = r.results.iter().find(|x| x.name == "b-squared").unwrap();
        assert!(b2.failures > 0);
        assert!(b2.witness.as_ref().unwrap().contains("residual"));
    }
}

#[cfg(test)]
mod zoo_tests {
    use super::*;
    use crate::dga::zoo;

    #[test]
    fn whole_zoo_small_run() {
        for name in zoo::names() {
            let a = zoo::random_test_dga(name, 11).unwrap();
            let cx = SuiteCtx { a: &a, ops: BarOps::new(&a), centrals: a.centrals().iter().map(|c| c.elem.clone()).collect() };
            let spec = SampleSpec { samples: 16, ..Default::default() };
            let samples = draw_samples(&a, &a.basis(), cx.centrals.len(), 5, &spec);
            let r = run_identity_suite(name, &cx, &samples);
            for f in r.failed() {
                panic!("{name}: {} failed {}/{}: {:?}", f.name, f.failures, f.samples, f.witness);
            }
        }
    }
}
