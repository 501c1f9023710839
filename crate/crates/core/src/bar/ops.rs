//! Operators on the normalized cyclic complex `C_*(A)`.
//!
//! Building blocks (`tau`, `delta0`, `mu0`, insertion of central elements)
//! act on raw bar tensors whose slots may hold the unit. Every named operator
//! composes them on a representative and then projects to the normalized
//! complex by discarding tensors with a unit slot.

use super::chain::{Bar, BarLin, Chain};
use crate::dga::{Elem, SuperAlgebra};
use crate::exact::{Lin, Rational};

/// Named operators on `C_*(A)`.
#[derive(Clone, Copy, Debug)]
pub enum Op<'c, B: Ord> {
    Tau,
    S,
    N,
    NPrime,
    /// Hochschild differential `b = b(delta) + b(mu)`.
    B,
    /// Connes operator `B = sN`.
    Connes,
    BDelta,
    BMu,
    Mu0,
    Delta0,
    Gamma,
    EDelta,
    BigEDelta,
    TildeEDelta,
    TildeBigEDelta,
    Bc(&'c Elem<B>),
    Ec(&'c Elem<B>),
    BigEc(&'c Elem<B>),
    TildeBigEc(&'c Elem<B>),
    Hcc(&'c Elem<B>, &'c Elem<B>),
    Hc(&'c Elem<B>),
    HPhi,
}

#[derive(Clone, Copy)]
pub struct BarOps<'a, A> {
    pub a: &'a A,
    corrupt_tau: bool,
}

fn sign(k: usize) -> Rational {
    Rational::sign(k)
}

impl<'a, A: SuperAlgebra> BarOps<'a, A> {
    pub fn new(a: &'a A) -> Self {
        BarOps { a, corrupt_tau: false }
    }

    /// Test fixture: drops the slot-parity part of the cyclic sign.
    pub fn with_corrupted_tau(a: &'a A) -> Self {
        BarOps { a, corrupt_tau: true }
    }

    fn p(&self, b: &A::Basis) -> usize {
        self.a.parity(b) as usize
    }

    /// Parity of `a0[a1|...|al]`: `sum |a_i| + l`.
    pub fn tensor_parity(&self, t: &[A::Basis]) -> usize {
        (t.iter().map(|b| self.p(b)).sum::<usize>() + t.len() - 1) % 2
    }

    pub fn is_normalized(&self, t: &[A::Basis]) -> bool {
        t[1..].iter().all(|b| !self.a.is_unit(b))
    }

    pub fn normalize(&self, mut x: BarLin<A::Basis>) -> BarLin<A::Basis> {
        x.retain(|t, _| t[1..].iter().all(|b| !self.a.is_unit(b)));
        x
    }

    // ---- raw building blocks ----
    // On length 0 the cyclic operator is the identity; only the named
    // operator `Op::Tau` rejects it.

    pub fn tau_raw(&self, t: &[A::Basis]) -> (Bar<A::Basis>, Rational) {
        let l = t.len() - 1;
        if l == 0 {
            return (t.to_vec(), Rational::one());
        }
        let rest: usize = t[1..].iter().map(|b| self.p(b)).sum();
        let e = if self.corrupt_tau { (self.p(&t[0]) + 1) * l } else { (self.p(&t[0]) + 1) * (l + rest) };
        let mut out = t[1..].to_vec();
        out.push(t[0].clone());
        (out, sign(e))
    }

    pub fn tau_inv_raw(&self, t: &[A::Basis]) -> (Bar<A::Basis>, Rational) {
        let l = t.len() - 1;
        if l == 0 {
            return (t.to_vec(), Rational::one());
        }
        let last = &t[l];
        let rest: usize = t[..l].iter().map(|b| self.p(b)).sum();
        let mut out = Vec::with_capacity(t.len());
        out.push(last.clone());
        out.extend_from_slice(&t[..l]);
        (out, sign((self.p(last) + 1) * (l + rest)))
    }

    /// `tau^k` for any integer `k`; identity on length 0 when `k = 0`.
    pub fn tau_pow(&self, t: &[A::Basis], k: i64) -> (Bar<A::Basis>, Rational) {
        let mut cur = t.to_vec();
        let mut s = Rational::one();
        if k == 0 {
            return (cur, s);
        }
        for _ in 0..k.unsigned_abs() {
            let (n, e) = if k > 0 { self.tau_raw(&cur) } else { self.tau_inv_raw(&cur) };
            cur = n;
            if e.is_negative() {
                s = -s;
            }
        }
        (cur, s)
    }

    pub fn s_raw(&self, t: &[A::Basis]) -> Bar<A::Basis> {
        let mut out = Vec::with_capacity(t.len() + 1);
        out.push(self.a.unit());
        out.extend_from_slice(t);
        out
    }

    pub fn delta0_raw(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        for (d, c) in &self.a.diff(&t[0]) {
            let mut s = t.to_vec();
            s[0] = d.clone();
            out.add(s, c.clone());
        }
        out
    }

    pub fn mu0_raw(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        assert!(t.len() >= 2, "mu0 needs a tensor of positive length");
        let mut out = Lin::new();
        let s = sign(self.p(&t[0]));
        for (m, c) in &self.a.mul(&t[0], &t[1]) {
            let mut n = Vec::with_capacity(t.len() - 1);
            n.push(m.clone());
            n.extend_from_slice(&t[2..]);
            out.add(n, c * &s);
        }
        out
    }

    /// `tau^-i op tau^i` applied to one tensor.
    pub fn conj_raw(
        &self,
        t: &[A::Basis],
        i: i64,
        op: impl Fn(&[A::Basis]) -> BarLin<A::Basis>,
    ) -> BarLin<A::Basis> {
        let (t1, s1) = self.tau_pow(t, i);
        let mut out = Lin::new();
        for (t2, c2) in &op(&t1) {
            let (t3, s3) = self.tau_pow(t2, -i);
            out.add(t3, &(c2 * &s1) * &s3);
        }
        out
    }

    pub fn delta_i_raw(&self, t: &[A::Basis], i: usize) -> BarLin<A::Basis> {
        self.conj_raw(t, i as i64, |s| self.delta0_raw(s))
    }

    pub fn mu_i_raw(&self, t: &[A::Basis], i: usize) -> BarLin<A::Basis> {
        self.conj_raw(t, i as i64, |s| self.mu0_raw(s))
    }

    /// `c^(i)`: inserts `c` as the `i`-th slot, `1 <= i <= l+1`.
    pub fn c_i_raw(&self, c: &Elem<A::Basis>, t: &[A::Basis], i: usize) -> BarLin<A::Basis> {
        assert!(i >= 1 && i <= t.len(), "insertion index out of range");
        let e: usize = i + t[..i].iter().map(|b| self.p(b)).sum::<usize>();
        let s = sign(e);
        let mut out = Lin::new();
        for (b, k) in c {
            let mut n = Vec::with_capacity(t.len() + 1);
            n.extend_from_slice(&t[..i]);
            n.push(b.clone());
            n.extend_from_slice(&t[i..]);
            out.add(n, k * &s);
        }
        out
    }

    /// Applies a raw per-tensor map linearly.
    pub fn lin(&self, x: &BarLin<A::Basis>, f: impl Fn(&[A::Basis]) -> BarLin<A::Basis>) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        for (t, c) in x {
            out.add_scaled(&f(t), c);
        }
        out
    }

    fn tau_lin(&self, x: &BarLin<A::Basis>, k: i64) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        for (t, c) in x {
            let (s, e) = self.tau_pow(t, k);
            out.add(s, c * &e);
        }
        out
    }

    fn s_lin(&self, x: &BarLin<A::Basis>) -> BarLin<A::Basis> {
        x.map_keys(|t| self.s_raw(t))
    }

    // ---- named operators on a single tensor ----

    pub fn b_delta(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        for i in 0..t.len() {
            out.add_lin(&self.delta_i_raw(t, i));
        }
        self.normalize(out)
    }

    pub fn b_mu(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        if t.len() >= 2 {
            for i in 0..t.len() {
                out.add_lin(&self.mu_i_raw(t, i));
            }
        }
        self.normalize(out)
    }

    pub fn b(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut out = self.b_delta(t);
        out.add_lin(&self.b_mu(t));
        out
    }

    pub fn n_raw(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        for i in 0..t.len() {
            let (s, e) = self.tau_pow(t, i as i64);
            out.add(s, e);
        }
        out
    }

    pub fn n_prime_raw(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        for i in 1..=t.len() {
            let (s, e) = self.tau_pow(t, i as i64);
            out.add(s, &e * &Rational::from(i));
        }
        out
    }

    pub fn connes(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        self.normalize(self.s_lin(&self.n_raw(t)))
    }

    pub fn b_c(&self, c: &Elem<A::Basis>, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut out = Lin::new();
        for i in 1..=t.len() {
            out.add_lin(&self.c_i_raw(c, t, i));
        }
        self.normalize(out)
    }

    pub fn e_c(&self, c: &Elem<A::Basis>, t: &[A::Basis]) -> BarLin<A::Basis> {
        let x = self.c_i_raw(c, t, 1);
        self.normalize(self.lin(&x, |s| self.mu0_raw(s)).neg())
    }

    pub fn big_e_c(&self, c: &Elem<A::Basis>, t: &[A::Basis]) -> BarLin<A::Basis> {
        let l = t.len() - 1;
        let mut out = Lin::new();
        for i in 1..=l + 1 {
            let ci = self.c_i_raw(c, t, i);
            for j in i + 1..=l + 2 {
                out.sub_lin(&self.s_lin(&self.tau_lin(&ci, j as i64)));
            }
        }
        self.normalize(out)
    }

    pub fn e_delta(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        if t.len() < 2 {
            return Lin::new();
        }
        let x = self.delta_i_raw(t, 1);
        self.normalize(self.lin(&x, |s| self.mu0_raw(s)).neg())
    }

    pub fn big_e_delta(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let l = t.len() - 1;
        let mut out = Lin::new();
        for i in 1..=l {
            let di = self.delta_i_raw(t, i);
            for j in i + 1..=l + 1 {
                out.sub_lin(&self.s_lin(&self.tau_lin(&di, j as i64)));
            }
        }
        self.normalize(out)
    }

    pub fn tilde_e_delta(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let l = t.len() - 1;
        if l == 0 {
            return Lin::new();
        }
        let x = self.delta_i_raw(t, l);
        self.normalize(self.lin(&x, |s| self.mu_i_raw(s, l)))
    }

    pub fn tilde_big_e_delta(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let l = t.len() - 1;
        let mut out = Lin::new();
        for i in 1..=l {
            let di = self.delta_i_raw(t, i);
            for j in 1..=i {
                out.add_lin(&self.s_lin(&self.tau_lin(&di, j as i64)));
            }
        }
        self.normalize(out)
    }

    pub fn h_cc(&self, c: &Elem<A::Basis>, c2: &Elem<A::Basis>, t: &[A::Basis]) -> BarLin<A::Basis> {
        let l = t.len() - 1;
        let mut out = Lin::new();
        for i in 1..=l + 1 {
            let ci = self.c_i_raw(c, t, i);
            let c2i = self.c_i_raw(c2, t, i);
            for j in i + 1..=l + 2 {
                let mut inner = self.lin(&c2i, |s| self.c_i_raw(c, s, j));
                inner.sub_lin(&self.lin(&ci, |s| self.c_i_raw(c2, s, j)));
                for m in j + 1..=l + 3 {
                    out.add_lin(&self.s_lin(&self.tau_lin(&inner, m as i64)));
                }
            }
        }
        self.normalize(out)
    }

    pub fn h_c(&self, c: &Elem<A::Basis>, t: &[A::Basis]) -> BarLin<A::Basis> {
        let l = t.len() - 1;
        let mut out = Lin::new();
        for i in 1..=l {
            let ci = self.c_i_raw(c, t, i);
            let di = self.delta_i_raw(t, i);
            for j in i + 1..=l + 1 {
                let mut inner = self.lin(&ci, |s| self.delta_i_raw(s, j));
                inner.sub_lin(&self.lin(&di, |s| self.c_i_raw(c, s, j)));
                for m in j + 1..=l + 2 {
                    out.add_lin(&self.s_lin(&self.tau_lin(&inner, m as i64)));
                }
            }
        }
        self.normalize(out)
    }

    /// `delta^(0) (1 - N)`.
    pub fn h_phi(&self, t: &[A::Basis]) -> BarLin<A::Basis> {
        let mut x = Lin::basis(t.to_vec());
        x.sub_lin(&self.n_raw(t));
        self.normalize(self.lin(&x, |s| self.delta0_raw(s)))
    }

    pub fn tensor_op(&self, op: &Op<'_, A::Basis>, t: &[A::Basis]) -> BarLin<A::Basis> {
        match op {
            Op::Tau => {
                if t.len() < 2 {
                    panic!("tau is undefined on length 0");
                }
                let (s, e) = self.tau_raw(t);
                self.normalize(Lin::single(s, e))
            }
            Op::S => self.normalize(Lin::basis(self.s_raw(t))),
            Op::N => self.normalize(self.n_raw(t)),
            Op::NPrime => self.normalize(self.n_prime_raw(t)),
            Op::B => self.b(t),
            Op::Connes => self.connes(t),
            Op::BDelta => self.b_delta(t),
            Op::BMu => self.b_mu(t),
            Op::Mu0 => {
                if t.len() < 2 {
                    Lin::new()
                } else {
                    self.normalize(self.mu0_raw(t))
                }
            }
            Op::Delta0 => self.normalize(self.delta0_raw(t)),
            Op::Gamma => Lin::single(t.to_vec(), Rational::from(t.len() - 1)),
            Op::EDelta => self.e_delta(t),
            Op::BigEDelta => self.big_e_delta(t),
            Op::TildeEDelta => self.tilde_e_delta(t),
            Op::TildeBigEDelta => self.tilde_big_e_delta(t),
            Op::Bc(c) => self.b_c(c, t),
            Op::Ec(c) => self.e_c(c, t),
            Op::BigEc(c) => self.big_e_c(c, t),
            Op::TildeBigEc(c) => {
                let mut out = self.big_e_c(c, t);
                let bc = self.b_c(c, t);
                out.add_lin(&self.lin(&bc, |s| self.connes(s)));
                out
            }
            Op::Hcc(c, c2) => self.h_cc(c, c2, t),
            Op::Hc(c) => self.h_c(c, t),
            Op::HPhi => self.h_phi(t),
        }
    }

    /// Applies a named operator to a chain, coefficient-wise.
    pub fn apply(&self, op: Op<'_, A::Basis>, x: &Chain<A::Basis>) -> Chain<A::Basis> {
        x.apply(|t| self.tensor_op(&op, t))
    }

    /// `b + uB`.
    pub fn b_plus_ub(&self, x: &Chain<A::Basis>) -> Chain<A::Basis> {
        self.apply(Op::B, x).plus(&self.apply(Op::Connes, x).times_u(1))
    }

    /// `Delta = b + sum_j z_j b(c_j) + uB`.
    pub fn delta_total(&self, centrals: &[Elem<A::Basis>], x: &Chain<A::Basis>) -> Chain<A::Basis> {
        let mut out = self.b_plus_ub(x);
        for (j, c) in centrals.iter().enumerate() {
            out.add(&self.apply(Op::Bc(c), x).times_z(j));
        }
        out
    }

    /// `d_u + e(delta)/2u^2 + (E(delta) - gamma)/2u + sum_j z_j (e(c_j)/u^2 + E(c_j)/u)`.
    pub fn nabla_u(&self, centrals: &[Elem<A::Basis>], x: &Chain<A::Basis>) -> Chain<A::Basis> {
        let half = Rational::new(1, 2);
        let mut out = x.d_u();
        out.add_scaled(&self.apply(Op::EDelta, x).times_u(-2), &half);
        let eg = self.apply(Op::BigEDelta, x).minus(&self.apply(Op::Gamma, x));
        out.add_scaled(&eg.times_u(-1), &half);
        for (j, c) in centrals.iter().enumerate() {
            let t = self.apply(Op::Ec(c), x).times_u(-2).plus(&self.apply(Op::BigEc(c), x).times_u(-1));
            out.add(&t.times_z(j));
        }
        out
    }

    /// `d_{z_i} - e(c_i)/u - E(c_i)`.
    pub fn nabla_z(&self, centrals: &[Elem<A::Basis>], i: usize, x: &Chain<A::Basis>) -> Chain<A::Basis> {
        let c = &centrals[i];
        let mut out = x.d_z(i);
        out = out.minus(&self.apply(Op::Ec(c), x).times_u(-1));
        out.minus(&self.apply(Op::BigEc(c), x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::FiniteDga;
    use crate::exact::q;

    #[test]
    fn tau_signs_on_length_one() {
        let a = FiniteDga::exterior(2);
        let ops = BarOps::new(&a);
        // both even (unit and e1e2)
        assert_eq!(ops.tau_raw(&[3, 3]), (vec![3, 3], q(-1, 1)));
        // both odd
        assert_eq!(ops.tau_raw(&[1, 2]), (vec![2, 1], q(1, 1)));
    }

    #[test]
    fn tau_has_order_l_plus_one() {
        let a = FiniteDga::exterior(3);
        let ops = BarOps::new(&a);
        for t in [vec![1usize, 2, 3], vec![3, 5, 6, 7], vec![0, 1]] {
            let l = t.len() as i64 - 1;
            assert_eq!(ops.tau_pow(&t, l + 1), (t.clone(), q(1, 1)));
            let (s, e) = ops.tau_raw(&t);
            assert_eq!(ops.tau_inv_raw(&s), (t.clone(), e));
        }
    }

    #[test]
    fn connes_on_length_zero() {
        let a = FiniteDga::exterior(2);
        let ops = BarOps::new(&a);
        assert_eq!(ops.connes(&[1]), Lin::basis(vec![0, 1]));
        // B(1) = 1[1] is degenerate
        assert!(ops.connes(&[0]).is_zero());
    }

    #[test]
    fn b_c_on_even_length_zero() {
        let a = FiniteDga::exterior(2);
        let c = Lin::basis(3usize);
        let ops = BarOps::new(&a);
        assert_eq!(ops.b_c(&c, &[0]), Lin::single(vec![0, 3], q(-1, 1)));
    }

    #[test]
    fn e_c_multiplies_a0() {
        let a = FiniteDga::exterior(3);
        let c = Lin::basis(3usize);
        let ops = BarOps::new(&a);
        // e(c)(e3[e1]) = e3 c [e1] = e3 e1 e2 [e1] = e1e2e3 [e1]
        assert_eq!(ops.e_c(&c, &[4, 1]), Lin::basis(vec![7, 1]));
    }
}
