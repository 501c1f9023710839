use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::exact::Rational;

pub type Exponent = Vec<u32>;

/// Positive integer variable weights and the total weight `W` of `f`,
/// rescaled so that `W` is even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    weights: Vec<i64>,
    total: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weights must be positive")]
    NonPositive,
    #[error("variable weight {0} is not below the total weight {1}")]
    TooHeavy(i64, i64),
    #[error("no variables")]
    Empty,
}

impl WeightSystem {
    pub fn new(weights: Vec<i64>, total: i64) -> Result<Self, WeightError> {
        if weights.is_empty() {
            return Err(WeightError::Empty);
        }
        if total <= 0 || weights.iter().any(|&w| w <= 0) {
            return Err(WeightError::NonPositive);
        }
        if let Some(&w) = weights.iter().find(|&&w| w >= total) {
            return Err(WeightError::TooHeavy(w, total));
        }
        let g = weights.iter().fold(total, |g, &w| gcd(g, w));
        let (mut weights, mut total): (Vec<i64>, i64) =
            (weights.iter().map(|w| w / g).collect(), total / g);
        if total % 2 != 0 {
            weights.iter_mut().for_each(|w| *w *= 2);
            total *= 2;
        }
        Ok(WeightSystem { weights, total })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn half(&self) -> i64 {
        self.total / 2
    }

    /// Weight of the one-dimensional top piece of the Milnor algebra.
    pub fn socle_weight(&self) -> i64 {
        self.weights.iter().map(|w| self.total - 2 * w).sum()
    }

    pub fn monomial_weight(&self, e: &[u32]) -> i64 {
        e.iter().zip(&self.weights).map(|(&a, &w)| a as i64 * w).sum()
    }

    /// All exponent vectors of weight exactly `w`, in increasing lex order.
    pub fn monomials_of_weight(&self, w: i64) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.n()];
        self.enumerate(0, w, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, i: usize, left: i64, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if i == self.n() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let wi = self.weights[i];
        let mut a = 0;
        while a as i64 * wi <= left {
            cur[i] = a;
            self.enumerate(i + 1, left - a as i64 * wi, cur, out);
            a += 1;
        }
        cur[i] = 0;
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Polynomial in `n` variables with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WPoly {
    n: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl WPoly {
    pub fn zero(n: usize) -> Self {
        WPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::term(c, vec![0; n])
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn term(c: Rational, e: Exponent) -> Self {
        let mut p = WPoly::zero(e.len());
        p.add_term(e, c);
        p
    }

    pub fn monomial(e: Exponent) -> Self {
        Self::term(Rational::one(), e)
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(e)
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Rational, Exponent)>) -> Self {
        let mut p = WPoly::zero(n);
        for (c, e) in terms {
            assert_eq!(e.len(), n, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> WPoly {
        if c.is_zero() {
            return WPoly::zero(self.n);
        }
        WPoly { n: self.n, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &[u32]) -> WPoly {
        WPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self, i: usize) -> WPoly {
        let mut out = WPoly::zero(self.n);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * &Rational::from(e[i] as i64));
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Common weight of all monomials, `None` if inhomogeneous or zero.
    pub fn weight(&self, ws: &WeightSystem) -> Option<i64> {
        let mut it = self.terms.keys().map(|e| ws.monomial_weight(e));
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn is_homogeneous(&self, ws: &WeightSystem) -> bool {
        self.is_zero() || self.weight(ws).is_some()
    }

    /// Splits into weight-homogeneous components.
    pub fn components(&self, ws: &WeightSystem) -> BTreeMap<i64, WPoly> {
        let mut out: BTreeMap<i64, WPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(ws.monomial_weight(e))
                .or_insert_with(|| WPoly::zero(self.n))
                .add_term(e.clone(), c.clone());
        }
        out
    }

    /// Drops every monomial of total degree at least `m`.
    pub fn truncate_degree(&self, m: u32) -> WPoly {
        WPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() < m)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> WPoly {
        (0..k).fold(WPoly::one(self.n), |acc, _| &acc * self)
    }
}

impl fmt::Display for WPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z", "w"];
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| {
                    let v = if self.n <= 4 { names[i].to_string() } else { format!("x{}", i + 1) };
                    if a == 1 { v } else { format!("{v}^{a}") }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &WPoly {
    type Output = WPoly;
    fn add(self, o: &WPoly) -> WPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &WPoly {
    type Output = WPoly;
    fn sub(self, o: &WPoly) -> WPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &WPoly {
    type Output = WPoly;
    fn neg(self) -> WPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &WPoly {
    type Output = WPoly;
    fn mul(self, o: &WPoly) -> WPoly {
        let mut out = WPoly::zero(self.n.max(o.n));
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }
}

/// Determinant of the matrix of second partial derivatives.
pub fn hessian(f: &WPoly) -> WPoly {
    let n = f.nvars();
    let second: Vec<Vec<WPoly>> = (0..n)
        .map(|i| {
            let fi = f.derivative(i);
            (0..n).map(|j| fi.derivative(j)).collect()
        })
        .collect();
    det_poly(&second)
}

fn det_poly(m: &[Vec<WPoly>]) -> WPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = WPoly::zero(m[0][0].nvars());
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<WPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = a * &det_poly(&minor);
        out = if j % 2 == 0 { &out + &term } else { &out - &term };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn x3y3() -> WPoly {
        WPoly::from_terms(2, [(q(1, 1), vec![3, 0]), (q(1, 1), vec![0, 3])])
    }

    #[test]
    fn weights_are_scaled_to_even_total() {
        let ws = WeightSystem::new(vec![1], 3).unwrap();
        assert_eq!(ws.weights(), &[2]);
        assert_eq!(ws.total(), 6);
        let ws = WeightSystem::new(vec![2, 2], 6).unwrap();
        assert_eq!((ws.weights(), ws.total()), (&[2i64, 2][..], 6));
        assert!(WeightSystem::new(vec![3], 3).is_err());
    }

    #[test]
    fn hessian_examples() {
        assert_eq!(hessian(&WPoly::from_terms(1, [(q(1, 1), vec![2])])), WPoly::constant(1, q(2, 1)));
        assert_eq!(hessian(&WPoly::from_terms(1, [(q(1, 1), vec![3])])), WPoly::term(q(6, 1), vec![1]));
        assert_eq!(hessian(&x3y3()), WPoly::term(q(36, 1), vec![1, 1]));
    }

    #[test]
    fn homogeneity() {
        let ws = WeightSystem::new(vec![1, 1], 3).unwrap();
        assert_eq!(x3y3().weight(&ws), Some(ws.total()));
        let bad = &x3y3() + &WPoly::var(2, 0);
        assert_eq!(bad.weight(&ws), None);
    }

    #[test]
    fn monomial_enumeration() {
        let ws = WeightSystem::new(vec![1, 2], 4).unwrap();
        assert_eq!(ws.monomials_of_weight(2), vec![vec![0, 1], vec![2, 0]]);
    }
}
