use super::{Elem, SuperAlgebra};
use crate::exact::{Lin, Rational};
use crate::poly::Exponent;

/// Opposite algebra: `a *op b = (-1)^{|a||b|} b a`, same differential.
#[derive(Clone, Copy, Debug)]
pub struct Opposite<'a, A>(pub &'a A);

impl<A: SuperAlgebra> SuperAlgebra for Opposite<'_, A> {
    type Basis = A::Basis;

    fn unit(&self) -> A::Basis {
        self.0.unit()
    }

    fn parity(&self, b: &A::Basis) -> u8 {
        self.0.parity(b)
    }

    fn weight(&self, b: &A::Basis) -> i64 {
        self.0.weight(b)
    }

    fn mul(&self, x: &A::Basis, y: &A::Basis) -> Elem<A::Basis> {
        let s = Rational::sign((self.0.parity(x) * self.0.parity(y)) as usize);
        self.0.mul(y, x).scaled(&s)
    }

    fn diff(&self, x: &A::Basis) -> Elem<A::Basis> {
        self.0.diff(x)
    }

    fn label(&self, b: &A::Basis) -> String {
        self.0.label(b)
    }
}

/// Graded tensor product with `(a (x) a')(b (x) b') = (-1)^{|a'||b|} ab (x) a'b'`.
#[derive(Clone, Copy, Debug)]
pub struct Tensor<'a, A, B>(pub &'a A, pub &'a B);

impl<A: SuperAlgebra, B: SuperAlgebra> SuperAlgebra for Tensor<'_, A, B> {
    type Basis = (A::Basis, B::Basis);

    fn unit(&self) -> Self::Basis {
        (self.0.unit(), self.1.unit())
    }

    fn parity(&self, b: &Self::Basis) -> u8 {
        (self.0.parity(&b.0) + self.1.parity(&b.1)) % 2
    }

    fn weight(&self, b: &Self::Basis) -> i64 {
        self.0.weight(&b.0) + self.1.weight(&b.1)
    }

    fn mul(&self, x: &Self::Basis, y: &Self::Basis) -> Elem<Self::Basis> {
        let s = Rational::sign((self.1.parity(&x.1) * self.0.parity(&y.0)) as usize);
        let left = self.0.mul(&x.0, &y.0);
        let right = self.1.mul(&x.1, &y.1);
        let mut out = Lin::new();
        for (p, c) in &left {
            for (q, d) in &right {
                out.add((p.clone(), q.clone()), &(c * d) * &s);
            }
        }
        out
    }

    fn diff(&self, x: &Self::Basis) -> Elem<Self::Basis> {
        let mut out = Lin::new();
        for (p, c) in &self.0.diff(&x.0) {
            out.add((p.clone(), x.1.clone()), c.clone());
        }
        let s = Rational::sign(self.0.parity(&x.0) as usize);
        for (q, c) in &self.1.diff(&x.1) {
            out.add((x.0.clone(), q.clone()), c * &s);
        }
        out
    }

    fn label(&self, b: &Self::Basis) -> String {
        format!("{}(x){}", self.0.label(&b.0), self.1.label(&b.1))
    }
}

/// Commutative even polynomial ring `Q[x_1..x_n]` with zero differential.
#[derive(Clone, Copy, Debug)]
pub struct PolyRing {
    pub n: usize,
}

impl SuperAlgebra for PolyRing {
    type Basis = Exponent;

    fn unit(&self) -> Exponent {
        vec![0; self.n]
    }

    fn parity(&self, _b: &Exponent) -> u8 {
        0
    }

    fn mul(&self, x: &Exponent, y: &Exponent) -> Elem<Exponent> {
        Lin::basis(x.iter().zip(y).map(|(a, b)| a + b).collect())
    }

    fn diff(&self, _x: &Exponent) -> Elem<Exponent> {
        Lin::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{EndP, FiniteDga};

    #[test]
    fn opposite_of_odd_pair() {
        let e = EndP::new(1).unwrap();
        let a = FiniteDga::twisted_endp(1, &[0], &[0]);
        let op = Opposite(&a);
        // theta *op dtheta = -dtheta theta = theta dtheta - 1
        let got = op.mul(&e.theta(0), &e.dtheta(0));
        let want = Lin::from_terms([(3usize, Rational::one()), (0, -Rational::one())]);
        assert_eq!(got, want);
        let opop = Opposite(&op);
        assert_eq!(opop.mul(&1, &2), a.mul(&1, &2));
    }

    #[test]
    fn tensor_sign() {
        let x = FiniteDga::exterior(1);
        let t = Tensor(&x, &x);
        // (1 (x) e)(e (x) 1) = - e (x) e
        assert_eq!(t.mul(&(0, 1), &(1, 0)), Lin::single((1, 1), -Rational::one()));
    }
}
