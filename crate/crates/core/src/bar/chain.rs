use std::collections::BTreeMap;
use std::fmt;

use crate::exact::{Lin, Rational};

/// A bar tensor `a0[a1|...|al]` stored as `[a0, a1, ..., al]`.
pub type Bar<B> = Vec<B>;

/// Linear combination of bar tensors with rational coefficients.
pub type BarLin<B> = Lin<Bar<B>>;

/// Monomial `u^u z^z` in the coefficient ring (Laurent in `u`, polynomial in `z`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono {
    pub u: i32,
    pub z: Vec<u16>,
}

impl Mono {
    pub fn one() -> Self {
        Mono::default()
    }

    pub fn u(k: i32) -> Self {
        Mono { u: k, z: Vec::new() }
    }

    pub fn z_degree(&self) -> u32 {
        self.z.iter().map(|&e| e as u32).sum()
    }

    pub fn z_exp(&self, j: usize) -> u16 {
        self.z.get(j).copied().unwrap_or(0)
    }

    fn trim(mut self) -> Self {
        while self.z.last() == Some(&0) {
            self.z.pop();
        }
        self
    }

    pub fn times(&self, o: &Mono) -> Mono {
        let n = self.z.len().max(o.z.len());
        let z = (0..n).map(|j| self.z_exp(j) + o.z_exp(j)).collect();
        Mono { u: self.u + o.u, z }.trim()
    }

    pub fn with_z(&self, j: usize, e: u16) -> Mono {
        let mut z = self.z.clone();
        if z.len() <= j {
            z.resize(j + 1, 0);
        }
        z[j] = e;
        Mono { u: self.u, z }.trim()
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.u != 0 {
            parts.push(if self.u == 1 { "u".to_string() } else { format!("u^{}", self.u) });
        }
        for (j, &e) in self.z.iter().enumerate() {
            if e > 0 {
                parts.push(if e == 1 { format!("z{}", j + 1) } else { format!("z{}^{}", j + 1, e) });
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Chain with coefficients in `Q[z]((u))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain<B: Ord>(pub Lin<(Mono, Bar<B>)>);

impl<B: Ord + Clone> Default for Chain<B> {
    fn default() -> Self {
        Chain(Lin::new())
    }
}

impl<B: Ord + Clone> Chain<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn tensor(t: Bar<B>) -> Self {
        Chain(Lin::basis((Mono::one(), t)))
    }

    pub fn term(m: Mono, t: Bar<B>, c: Rational) -> Self {
        Chain(Lin::single((m, t), c))
    }

    pub fn from_lin(m: &Mono, l: &BarLin<B>) -> Self {
        let mut out = Lin::new();
        for (t, c) in l {
            out.add((m.clone(), t.clone()), c.clone());
        }
        Chain(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &Bar<B>, &Rational)> {
        self.0.iter().map(|((m, t), c)| (m, t, c))
    }

    pub fn add_term(&mut self, m: Mono, t: Bar<B>, c: Rational) {
        self.0.add((m, t), c);
    }

    pub fn add(&mut self, o: &Chain<B>) {
        self.0.add_lin(&o.0);
    }

    pub fn add_scaled(&mut self, o: &Chain<B>, c: &Rational) {
        self.0.add_scaled(&o.0, c);
    }

    pub fn plus(&self, o: &Chain<B>) -> Chain<B> {
        Chain(self.0.plus(&o.0))
    }

    pub fn minus(&self, o: &Chain<B>) -> Chain<B> {
        Chain(self.0.minus(&o.0))
    }

    pub fn scaled(&self, c: &Rational) -> Chain<B> {
        Chain(self.0.scaled(c))
    }

    pub fn neg(&self) -> Chain<B> {
        Chain(self.0.neg())
    }

    /// Multiplies every coefficient by the monomial `m`.
    pub fn times(&self, m: &Mono) -> Chain<B> {
        Chain(self.0.map_keys(|(n, t)| (n.times(m), t.clone())))
    }

    pub fn times_u(&self, k: i32) -> Chain<B> {
        self.times(&Mono::u(k))
    }

    pub fn times_z(&self, j: usize) -> Chain<B> {
        self.times(&Mono::default().with_z(j, 1))
    }

    pub fn d_u(&self) -> Chain<B> {
        let mut out = Lin::new();
        for ((m, t), c) in &self.0 {
            if m.u != 0 {
                out.add((Mono { u: m.u - 1, z: m.z.clone() }, t.clone()), c * &Rational::from(m.u as i64));
            }
        }
        Chain(out)
    }

    pub fn d_z(&self, j: usize) -> Chain<B> {
        let mut out = Lin::new();
        for ((m, t), c) in &self.0 {
            let e = m.z_exp(j);
            if e > 0 {
                out.add((m.with_z(j, e - 1), t.clone()), c * &Rational::from(e as i64));
            }
        }
        Chain(out)
    }

    /// The involution `u -> -u`.
    pub fn star(&self) -> Chain<B> {
        Chain(
            self.0
                .iter()
                .map(|((m, t), c)| ((m.clone(), t.clone()), if m.u % 2 == 0 { c.clone() } else { -c }))
                .collect(),
        )
    }

    /// Applies a linear operator on bar tensors, preserving coefficients.
    pub fn apply(&self, mut f: impl FnMut(&Bar<B>) -> BarLin<B>) -> Chain<B> {
        self.apply_to(|t| f(t))
    }

    /// Same as [`Chain::apply`] with a change of basis type.
    pub fn apply_to<C: Ord + Clone>(&self, mut f: impl FnMut(&Bar<B>) -> BarLin<C>) -> Chain<C> {
        let mut out = Lin::new();
        for ((m, t), c) in &self.0 {
            for (s, d) in &f(t) {
                out.add((m.clone(), s.clone()), c * d);
            }
        }
        Chain(out)
    }

    /// Groups the chain by coefficient monomial.
    pub fn by_mono(&self) -> BTreeMap<Mono, BarLin<B>> {
        let mut out: BTreeMap<Mono, BarLin<B>> = BTreeMap::new();
        for ((m, t), c) in &self.0 {
            out.entry(m.clone()).or_default().add(t.clone(), c.clone());
        }
        out
    }

    pub fn max_length(&self) -> usize {
        self.0.keys().map(|(_, t)| t.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter_mono(&self, keep: impl Fn(&Mono) -> bool) -> Chain<B> {
        Chain(self.0.iter().filter(|((m, _), _)| keep(m)).map(|(k, c)| (k.clone(), c.clone())).collect())
    }
}

/// Laurent polynomial in `u` with polynomial coefficients in `z`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Coef(pub Lin<Mono>);

impl Coef {
    pub fn zero() -> Self {
        Coef::default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn constant(c: Rational) -> Self {
        Coef(Lin::single(Mono::one(), c))
    }

    /// The `u^0 z^0` coefficient.
    pub fn constant_term(&self) -> Rational {
        self.0.get(&Mono::one())
    }

    pub fn coeff(&self, m: &Mono) -> Rational {
        self.0.get(m)
    }

    pub fn add_term(&mut self, m: Mono, c: Rational) {
        self.0.add(m, c);
    }

    pub fn plus(&self, o: &Coef) -> Coef {
        Coef(self.0.plus(&o.0))
    }

    pub fn minus(&self, o: &Coef) -> Coef {
        Coef(self.0.minus(&o.0))
    }

    pub fn scaled(&self, c: &Rational) -> Coef {
        Coef(self.0.scaled(c))
    }

    pub fn times(&self, m: &Mono) -> Coef {
        Coef(self.0.map_keys(|n| n.times(m)))
    }

    pub fn mul(&self, o: &Coef) -> Coef {
        let mut out = Lin::new();
        for (m, c) in &self.0 {
            for (n, d) in &o.0 {
                out.add(m.times(n), c * d);
            }
        }
        Coef(out)
    }

    pub fn star(&self) -> Coef {
        Coef(self.0.iter().map(|(m, c)| (m.clone(), if m.u % 2 == 0 { c.clone() } else { -c })).collect())
    }

    pub fn d_u(&self) -> Coef {
        let mut out = Lin::new();
        for (m, c) in &self.0 {
            if m.u != 0 {
                out.add(Mono { u: m.u - 1, z: m.z.clone() }, c * &Rational::from(m.u as i64));
            }
        }
        Coef(out)
    }

    pub fn d_z(&self, j: usize) -> Coef {
        let mut out = Lin::new();
        for (m, c) in &self.0 {
            let e = m.z_exp(j);
            if e > 0 {
                out.add(m.with_z(j, e - 1), c * &Rational::from(e as i64));
            }
        }
        Coef(out)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.0.iter()
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn d_u_on_inverse_power() {
        let c: Chain<u8> = Chain::term(Mono::u(-1), vec![0], q(1, 1));
        assert_eq!(c.d_u(), Chain::term(Mono::u(-2), vec![0], q(-1, 1)));
    }

    #[test]
    fn star_flips_odd_powers() {
        let c: Chain<u8> = Chain::term(Mono::u(1), vec![0], q(1, 1));
        assert_eq!(c.star(), c.neg());
    }

    #[test]
    fn z_product_rule() {
        let c: Chain<u8> = Chain::term(Mono::one().with_z(0, 2), vec![0], q(1, 1));
        assert_eq!(c.d_z(0), Chain::term(Mono::one().with_z(0, 1), vec![0], q(2, 1)));
    }
}
