//! Formal differential forms with `u`-Laurent and `z`-polynomial coefficients.

use std::fmt;

use crate::bar::Mono;
use crate::exact::{Lin, Rational};
use crate::poly::{Exponent, WPoly};

/// `x^x dx_I`, with `I` stored as a bit mask of strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormBasis {
    pub x: Exponent,
    pub dx: u32,
}

impl FormBasis {
    pub fn degree(&self) -> u32 {
        self.dx.count_ones()
    }
}

/// `dx_i ^ dx_I`, or `None` when `i` is already in `I`.
pub fn wedge_left(i: usize, mask: u32) -> Option<(u32, Rational)> {
    let bit = 1u32 << i;
    if mask & bit != 0 {
        return None;
    }
    let below = (mask & (bit - 1)).count_ones() as usize;
    Some((mask | bit, Rational::sign(below)))
}

/// `dx_I ^ dx_i`.
pub fn wedge_right(mask: u32, i: usize) -> Option<(u32, Rational)> {
    let bit = 1u32 << i;
    if mask & bit != 0 {
        return None;
    }
    let above = (mask >> (i + 1)).count_ones() as usize;
    Some((mask | bit, Rational::sign(above)))
}

/// `d(x^e)` as a list of `(i, coefficient, exponent)`.
pub fn d_monomial(e: &[u32]) -> Vec<(usize, Rational, Exponent)> {
    e.iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| {
            let mut x = e.to_vec();
            x[i] -= 1;
            (i, Rational::from(a as i64), x)
        })
        .collect()
}

fn add_exp(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Form(pub Lin<(Mono, FormBasis)>);

impl Form {
    pub fn zero() -> Self {
        Form(Lin::new())
    }

    pub fn term(m: Mono, x: Exponent, dx: u32, c: Rational) -> Self {
        Form(Lin::single((m, FormBasis { x, dx }), c))
    }

    /// The 0-form `g`.
    pub fn function(g: &WPoly) -> Self {
        Form(g.terms().map(|(e, c)| ((Mono::one(), FormBasis { x: e.clone(), dx: 0 }), c.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &FormBasis, &Rational)> {
        self.0.iter().map(|((m, b), c)| (m, b, c))
    }

    pub fn add_term(&mut self, m: Mono, b: FormBasis, c: Rational) {
        self.0.add((m, b), c);
    }

    pub fn add(&mut self, o: &Form) {
        self.0.add_lin(&o.0);
    }

    pub fn add_scaled(&mut self, o: &Form, c: &Rational) {
        self.0.add_scaled(&o.0, c);
    }

    pub fn plus(&self, o: &Form) -> Form {
        Form(self.0.plus(&o.0))
    }

    pub fn minus(&self, o: &Form) -> Form {
        Form(self.0.minus(&o.0))
    }

    pub fn scaled(&self, c: &Rational) -> Form {
        Form(self.0.scaled(c))
    }

    pub fn neg(&self) -> Form {
        Form(self.0.neg())
    }

    pub fn times(&self, m: &Mono) -> Form {
        Form(self.0.map_keys(|(n, b)| (n.times(m), b.clone())))
    }

    pub fn times_u(&self, k: i32) -> Form {
        self.times(&Mono::u(k))
    }

    pub fn times_z(&self, j: usize) -> Form {
        self.times(&Mono::one().with_z(j, 1))
    }

    fn map_basis(&self, f: impl Fn(&FormBasis) -> Lin<FormBasis>) -> Form {
        let mut out = Lin::new();
        for ((m, b), c) in &self.0 {
            for (nb, k) in &f(b) {
                out.add((m.clone(), nb.clone()), c * k);
            }
        }
        Form(out)
    }

    /// Relative de Rham differential.
    pub fn d(&self) -> Form {
        self.map_basis(|b| {
            let mut out = Lin::new();
            for (i, a, x) in d_monomial(&b.x) {
                if let Some((dx, s)) = wedge_left(i, b.dx) {
                    out.add(FormBasis { x, dx }, &a * &s);
                }
            }
            out
        })
    }

    /// `g * omega`.
    pub fn mul_poly(&self, g: &WPoly) -> Form {
        self.map_basis(|b| {
            g.terms().map(|(e, c)| (FormBasis { x: add_exp(e, &b.x), dx: b.dx }, c.clone())).collect()
        })
    }

    /// `dg ^ omega`.
    pub fn wedge_d(&self, g: &WPoly) -> Form {
        self.map_basis(|b| {
            let mut out = Lin::new();
            for (e, c) in g.terms() {
                for (i, a, x) in d_monomial(e) {
                    if let Some((dx, s)) = wedge_left(i, b.dx) {
                        out.add(FormBasis { x: add_exp(&x, &b.x), dx }, &(c * &a) * &s);
                    }
                }
            }
            out
        })
    }

    /// Multiplies the degree-`k` part by `k`.
    pub fn gamma(&self) -> Form {
        self.map_basis(|b| Lin::single(b.clone(), Rational::from(b.degree() as i64)))
    }

    pub fn d_u(&self) -> Form {
        let mut out = Lin::new();
        for ((m, b), c) in &self.0 {
            if m.u != 0 {
                out.add((Mono { u: m.u - 1, z: m.z.clone() }, b.clone()), c * &Rational::from(m.u as i64));
            }
        }
        Form(out)
    }

    pub fn d_z(&self, j: usize) -> Form {
        let mut out = Lin::new();
        for ((m, b), c) in &self.0 {
            let e = m.z_exp(j);
            if e > 0 {
                out.add((m.with_z(j, e - 1), b.clone()), c * &Rational::from(e as i64));
            }
        }
        Form(out)
    }

    /// `d_u + (f + sum z_j g_j) / u^2`.
    pub fn nabla_u(&self, f: &WPoly, gs: &[WPoly]) -> Form {
        let mut out = self.d_u();
        out.add(&self.mul_poly(f).times_u(-2));
        for (j, g) in gs.iter().enumerate() {
            out.add(&self.mul_poly(g).times_z(j).times_u(-2));
        }
        out
    }

    /// `d_{z_i} - g_i / u`.
    pub fn nabla_z(&self, gs: &[WPoly], i: usize) -> Form {
        self.d_z(i).minus(&self.mul_poly(&gs[i]).times_u(-1))
    }

    pub fn filter(&self, keep: impl Fn(&Mono, &FormBasis) -> bool) -> Form {
        Form(self.0.iter().filter(|((m, b), _)| keep(m, b)).map(|(k, c)| (k.clone(), c.clone())).collect())
    }

    /// Coefficient of `m dx_1 ^ ... ^ dx_n` as a polynomial.
    pub fn top_coefficient(&self, n: usize, m: &Mono) -> WPoly {
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        WPoly::from_terms(
            n,
            self.terms().filter(|(k, b, _)| *k == m && b.dx == full).map(|(_, b, c)| (c.clone(), b.x.clone())),
        )
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, b, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            let mono = m.to_string();
            if mono != "1" {
                write!(f, "{mono}")?;
            }
            let xs: Vec<String> = b
                .x
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("x{}", i + 1) } else { format!("x{}^{a}", i + 1) })
                .collect();
            if !xs.is_empty() {
                write!(f, "{}", xs.join(""))?;
            }
            for i in 0..32 {
                if b.dx & (1 << i) != 0 {
                    write!(f, " dx{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn x2() -> WPoly {
        WPoly::monomial(vec![2])
    }

    #[test]
    fn d_of_x_is_dx() {
        let w = Form::function(&WPoly::var(1, 0)).d();
        assert_eq!(w, Form::term(Mono::one(), vec![0], 1, q(1, 1)));
    }

    #[test]
    fn wedge_df_of_one() {
        let w = Form::function(&WPoly::one(1)).wedge_d(&x2());
        assert_eq!(w, Form::term(Mono::one(), vec![1], 1, q(2, 1)));
    }

    #[test]
    fn nabla_u_on_inverse_u() {
        let one = Form::function(&WPoly::one(1)).times_u(-1);
        let got = one.nabla_u(&x2(), &[]);
        let mut want = Form::term(Mono::u(-2), vec![0], 0, q(-1, 1));
        want.add(&Form::term(Mono::u(-3), vec![2], 0, q(1, 1)));
        assert_eq!(got, want);
    }

    #[test]
    fn wedge_is_antisymmetric() {
        // dx2 ^ dx1 = - dx1 ^ dx2
        assert_eq!(wedge_left(1, 0b01), Some((0b11, q(-1, 1))));
        assert_eq!(wedge_right(0b01, 1), Some((0b11, q(1, 1))));
        assert_eq!(wedge_left(0, 0b01), None);
    }

    #[test]
    fn d_squared_vanishes() {
        let g = WPoly::from_terms(2, [(q(1, 1), vec![2, 3]), (q(-3, 1), vec![1, 1])]);
        let w = Form::function(&g);
        assert!(!w.d().is_zero());
        assert!(w.d().d().is_zero());
        assert!(w.wedge_d(&g).wedge_d(&g).is_zero());
    }
}
