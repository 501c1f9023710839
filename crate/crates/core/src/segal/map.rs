//! The map `I_f = eps . str . exp(-b(D_f))` from chains of `A_f` to forms.

use super::forms::{d_monomial, wedge_right, Form, FormBasis};
use crate::bar::{Bar, BarLin, BarOps, Chain};
use crate::dga::{Elem, MfAlgebra, MfBasis, PolyRing, SuperAlgebra};
use crate::exact::{Lin, Rational};
use crate::poly::{Exponent, WPoly};

pub struct SegalMap<'a> {
    mf: &'a MfAlgebra,
    poly: PolyRing,
    d: Elem<MfBasis>,
    corrupt_epsilon: bool,
}

impl<'a> SegalMap<'a> {
    pub fn new(mf: &'a MfAlgebra) -> Self {
        SegalMap { mf, poly: PolyRing { n: mf.n() }, d: mf.d_element(), corrupt_epsilon: false }
    }

    /// Test fixture: `eps` picks up an extra `(-1)^l` on length `l`.
    pub fn with_corrupted_epsilon(mf: &'a MfAlgebra) -> Self {
        SegalMap { corrupt_epsilon: true, ..Self::new(mf) }
    }

    pub fn algebra(&self) -> &'a MfAlgebra {
        self.mf
    }

    pub fn n(&self) -> usize {
        self.mf.n()
    }

    pub fn poly_ring(&self) -> &PolyRing {
        &self.poly
    }

    pub fn poly_ops(&self) -> BarOps<'_, PolyRing> {
        BarOps::new(&self.poly)
    }

    /// `g (x) 1` as a central element of `A_f`.
    pub fn central(&self, g: &WPoly) -> Elem<MfBasis> {
        self.mf.poly_elem(g, 0)
    }

    /// `g` as an element of the polynomial ring.
    pub fn poly_elem(&self, g: &WPoly) -> Elem<Exponent> {
        g.terms().map(|(e, c)| (e.clone(), c.clone())).collect()
    }

    /// `b(D_f)`: inserts `D_f` into every bar position, without sign.
    pub fn insert_d(&self, t: &[MfBasis]) -> BarLin<MfBasis> {
        let mut out = Lin::new();
        for i in 1..=t.len() {
            for (b, c) in &self.d {
                let mut s = Vec::with_capacity(t.len() + 1);
                s.extend_from_slice(&t[..i]);
                s.push(b.clone());
                s.extend_from_slice(&t[i..]);
                out.add(s, c.clone());
            }
        }
        out
    }

    pub fn b_d(&self, x: &Chain<MfBasis>) -> Chain<MfBasis> {
        x.apply(|t| self.insert_d(t))
    }

    /// All terms of `exp(-b(D_f)) x` of length at most `max_len`.
    pub fn exp_neg_bd(&self, x: &Chain<MfBasis>, max_len: usize) -> Chain<MfBasis> {
        let short = |c: &Chain<MfBasis>| {
            Chain(c.0.iter().filter(|((_, t), _)| t.len() <= max_len + 1).map(|(k, v)| (k.clone(), v.clone())).collect())
        };
        let mut term = short(x);
        let mut out = term.clone();
        let mut k = 1i64;
        while !term.is_zero() {
            term = short(&self.b_d(&term)).scaled(&Rational::new(-1, k));
            out.add(&term);
            k += 1;
        }
        out
    }

    /// `str(phi0 T0[phi1 T1|...]) = (-1)^{sum_{i odd}|T_i|} str(T0...Tl) phi0[phi1|...]`.
    pub fn str_tensor(&self, t: &[MfBasis]) -> BarLin<Exponent> {
        let e = self.mf.endp();
        if t[1..].iter().any(|b| b.x.iter().all(|&a| a == 0)) {
            return Lin::new();
        }
        let mut prod: Lin<usize> = Lin::basis(t[0].t);
        for b in &t[1..] {
            let mut next = Lin::new();
            for (m, c) in &prod {
                for (k, d) in e.mul(*m, b.t) {
                    next.add(*k, c * d);
                }
            }
            prod = next;
            if prod.is_zero() {
                return Lin::new();
            }
        }
        let tr: Rational = prod.iter().map(|(m, c)| c * e.supertrace(*m)).sum();
        if tr.is_zero() {
            return Lin::new();
        }
        let odd: usize = t.iter().skip(1).step_by(2).map(|b| e.parity(b.t) as usize).sum();
        Lin::single(t.iter().map(|b| b.x.clone()).collect(), tr * Rational::sign(odd))
    }

    pub fn chain_str(&self, x: &Chain<MfBasis>) -> Chain<Exponent> {
        x.apply_to(|t| self.str_tensor(t))
    }

    /// `eps(phi0[phi1|...|phil]) = phi0 dphi1 ^ ... ^ dphil / l!`.
    pub fn hkr_tensor(&self, t: &[Exponent]) -> Lin<FormBasis> {
        let l = t.len() - 1;
        let mut acc: Lin<FormBasis> = Lin::basis(FormBasis { x: t[0].clone(), dx: 0 });
        for phi in &t[1..] {
            let mut next = Lin::new();
            for (b, c) in &acc {
                for (i, a, x) in d_monomial(phi) {
                    if let Some((dx, s)) = wedge_right(b.dx, i) {
                        let y = b.x.iter().zip(&x).map(|(p, q)| p + q).collect();
                        next.add(FormBasis { x: y, dx }, &(c * &a) * &s);
                    }
                }
            }
            acc = next;
            if acc.is_zero() {
                return acc;
            }
        }
        let mut scale = Rational::factorial(l as u32).recip();
        if self.corrupt_epsilon {
            scale = scale * Rational::sign(l);
        }
        acc.scaled(&scale)
    }

    pub fn hkr_epsilon(&self, x: &Chain<Exponent>) -> Form {
        let mut out = Form::zero();
        for (m, t, c) in x.iter() {
            for (b, k) in &self.hkr_tensor(t) {
                out.add_term(m.clone(), b.clone(), c * k);
            }
        }
        out
    }

    /// `eps . str` applied to a chain already in `C^Pi`.
    pub fn eps_str(&self, x: &Chain<MfBasis>) -> Form {
        self.hkr_epsilon(&self.chain_str(x))
    }

    /// `I_f(x)`. Terms of `exp(-b(D_f)) x` longer than `n` are dropped, since
    /// `eps` kills them.
    pub fn apply(&self, x: &Chain<MfBasis>) -> Form {
        self.eps_str(&self.exp_neg_bd(x, self.n()))
    }

    /// `eps . str` of the terms of length exactly `n + 1`, which should vanish.
    pub fn truncation_defect(&self, x: &Chain<MfBasis>) -> Form {
        let n = self.n();
        let next = self.exp_neg_bd(x, n + 1);
        let only: Chain<MfBasis> =
            Chain(next.0.iter().filter(|((_, t), _)| t.len() == n + 2).map(|(k, v)| (k.clone(), v.clone())).collect());
        self.eps_str(&only)
    }

    pub fn ops(&self) -> BarOps<'a, MfAlgebra> {
        BarOps::new(self.mf)
    }

    pub fn parity(&self, t: &Bar<MfBasis>) -> usize {
        self.ops().tensor_parity(t)
    }

    pub fn weight(&self, b: &MfBasis) -> i64 {
        self.mf.weight(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::Mono;
    use crate::exact::q;
    use crate::poly::WeightSystem;

    fn a_xn(n: u32) -> MfAlgebra {
        MfAlgebra::new(&WPoly::monomial(vec![n]), &WeightSystem::new(vec![1], n as i64).unwrap(), None).unwrap()
    }

    #[test]
    fn supertrace_of_theta_words() {
        let a = a_xn(2);
        let s = SegalMap::new(&a);
        let th = a.theta(0);
        let dth = a.dtheta(0);
        // str((theta - dtheta)(theta + dtheta)) = str(2 theta dtheta - 1) = -2
        let mut total = Rational::zero();
        for (p, cp) in [(th.clone(), q(1, 1)), (dth.clone(), q(-1, 1))] {
            for q2 in [th.clone(), dth.clone()] {
                let e = a.endp();
                for (m, c) in e.mul(p.t, q2.t) {
                    total += &(&cp * c) * e.supertrace(*m);
                }
            }
        }
        assert_eq!(total, q(-2, 1));
        assert!(s.str_tensor(&[th]).is_zero());
    }

    #[test]
    fn length_one_str_sign() {
        let a = a_xn(2);
        let s = SegalMap::new(&a);
        // x theta at slot 1 is odd: str(dtheta . x theta) picks up -1
        let x_th = MfBasis { x: vec![1], t: a.theta(0).t };
        let got = s.str_tensor(&[a.dtheta(0), x_th]);
        let e = a.endp();
        let plain: Rational = e.mul(a.dtheta(0).t, a.theta(0).t).iter().map(|(m, c)| c * e.supertrace(*m)).sum();
        assert_eq!(got, Lin::single(vec![vec![0], vec![1]], -plain));
    }

    #[test]
    fn hkr_examples() {
        let a = a_xn(2);
        let s = SegalMap::new(&a);
        assert_eq!(s.hkr_tensor(&[vec![2]]), Lin::basis(FormBasis { x: vec![2], dx: 0 }));
        assert_eq!(s.hkr_tensor(&[vec![0], vec![1]]), Lin::basis(FormBasis { x: vec![0], dx: 1 }));
        assert!(s.hkr_tensor(&[vec![1], vec![1], vec![1]]).is_zero());
    }

    #[test]
    fn quadric_odd_cycle_maps_to_minus_two_dx() {
        let a = a_xn(2);
        let s = SegalMap::new(&a);
        let alpha = Chain(Lin::from_terms([
            ((Mono::one(), vec![a.theta(0)]), q(1, 1)),
            ((Mono::one(), vec![a.dtheta(0)]), q(-1, 1)),
        ]));
        let got = s.apply(&alpha);
        assert_eq!(got, Form::term(Mono::one(), vec![0], 1, q(-2, 1)));
        assert!(s.truncation_defect(&alpha).is_zero());
    }

    #[test]
    fn unit_maps_through_insertions_only() {
        let a = a_xn(2);
        let s = SegalMap::new(&a);
        let one = Chain::tensor(vec![a.unit()]);
        assert!(s.str_tensor(&[a.unit()]).is_zero());
        // 1[D] has str(D) = 0, so I_f(1) = 0 for x^2
        assert!(s.apply(&one).is_zero());
    }

    #[test]
    fn cubic_cycle_image() {
        let a = a_xn(3);
        let s = SegalMap::new(&a);
        let x_th = MfBasis { x: vec![1], t: a.theta(0).t };
        let alpha = Chain(Lin::from_terms([
            ((Mono::one(), vec![a.dtheta(0)]), q(1, 1)),
            ((Mono::one(), vec![x_th]), q(-1, 1)),
        ]));
        let got = s.apply(&alpha);
        assert_eq!(got.top_coefficient(1, &Mono::one()).terms().count(), 1);
        assert_eq!(got.top_coefficient(1, &Mono::one()).coeff(&[1]).abs(), q(3, 1));
    }
}
