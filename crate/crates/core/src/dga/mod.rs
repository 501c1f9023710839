//! Z/2- and weight-graded unital dg algebras.
//!
//! Every algebra exposes a basis containing the unit, parities and weights of
//! basis elements, and structure constants for the product and differential.

use std::fmt::Debug;
use std::hash::Hash;

use crate::exact::{Lin, Rational};

pub mod endp;
pub mod finite;
pub mod mf;
pub mod ops;
pub mod zoo;

pub use endp::EndP;
pub use finite::FiniteDga;
pub use mf::{MfAlgebra, MfBasis, MfError};
pub use ops::{Opposite, PolyRing, Tensor};

pub type Elem<B> = Lin<B>;

pub trait SuperAlgebra: Sync {
    type Basis: Clone + Ord + Hash + Debug + Send + Sync;

    fn unit(&self) -> Self::Basis;
    fn parity(&self, b: &Self::Basis) -> u8;
    fn weight(&self, _b: &Self::Basis) -> i64 {
        0
    }
    fn mul(&self, x: &Self::Basis, y: &Self::Basis) -> Elem<Self::Basis>;
    fn diff(&self, x: &Self::Basis) -> Elem<Self::Basis>;
    fn label(&self, b: &Self::Basis) -> String {
        format!("{b:?}")
    }

    fn is_unit(&self, b: &Self::Basis) -> bool {
        *b == self.unit()
    }

    fn mul_elems(&self, x: &Elem<Self::Basis>, y: &Elem<Self::Basis>) -> Elem<Self::Basis> {
        let mut out = Lin::new();
        for (a, ca) in x {
            for (b, cb) in y {
                out.add_scaled(&self.mul(a, b), &(ca * cb));
            }
        }
        out
    }

    fn diff_elem(&self, x: &Elem<Self::Basis>) -> Elem<Self::Basis> {
        x.map_linear(|b| self.diff(b))
    }

    /// Parity of a homogeneous element, `None` for zero or mixed parity.
    fn elem_parity(&self, x: &Elem<Self::Basis>) -> Option<u8> {
        let mut it = x.keys().map(|b| self.parity(b));
        let p = it.next()?;
        it.all(|q| q == p).then_some(p)
    }
}

/// A distinguished central closed even element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Central<B: Ord> {
    pub name: String,
    pub elem: Elem<B>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error("associativity fails on ({0}, {1}, {2})")]
    Associativity(String, String, String),
    #[error("unit law fails on {0}")]
    Unit(String),
    #[error("d^2 != 0 on {0}")]
    DSquared(String),
    #[error("Leibniz rule fails on ({0}, {1})")]
    Leibniz(String, String),
    #[error("parity not preserved by product on ({0}, {1})")]
    ProductParity(String, String),
    #[error("d is not odd on {0}")]
    DiffParity(String),
    #[error("element {0} is not even")]
    NotEven(String),
    #[error("element {0} is not closed")]
    NotClosed(String),
    #[error("element {0} does not commute with {1}")]
    NotCentral(String, String),
}

/// Checks associativity, unit laws, parity, d^2 = 0 and the Leibniz rule on
/// all tuples from `basis`.
pub fn check_axioms<A: SuperAlgebra>(a: &A, basis: &[A::Basis]) -> Result<(), AxiomError> {
    let u = a.unit();
    for x in basis {
        let ex = Lin::basis(x.clone());
        if a.mul(&u, x) != ex || a.mul(x, &u) != ex {
            return Err(AxiomError::Unit(a.label(x)));
        }
        let dx = a.diff(x);
        if dx.keys().any(|y| a.parity(y) == a.parity(x)) {
            return Err(AxiomError::DiffParity(a.label(x)));
        }
        if !a.diff_elem(&dx).is_zero() {
            return Err(AxiomError::DSquared(a.label(x)));
        }
    }
    if !a.diff(&u).is_zero() {
        return Err(AxiomError::NotClosed(a.label(&u)));
    }
    for x in basis {
        for y in basis {
            let xy = a.mul(x, y);
            let p = (a.parity(x) + a.parity(y)) % 2;
            if xy.keys().any(|z| a.parity(z) != p) {
                return Err(AxiomError::ProductParity(a.label(x), a.label(y)));
            }
            // d(xy) = dx y + (-1)^|x| x dy
            let lhs = a.diff_elem(&xy);
            let mut rhs = a.mul_elems(&a.diff(x), &Lin::basis(y.clone()));
            let xdy = a.mul_elems(&Lin::basis(x.clone()), &a.diff(y));
            rhs.add_scaled(&xdy, &Rational::sign(a.parity(x) as usize));
            if lhs != rhs {
                return Err(AxiomError::Leibniz(a.label(x), a.label(y)));
            }
            for z in basis {
                let l = a.mul_elems(&xy, &Lin::basis(z.clone()));
                let r = a.mul_elems(&Lin::basis(x.clone()), &a.mul(y, z));
                if l != r {
                    return Err(AxiomError::Associativity(a.label(x), a.label(y), a.label(z)));
                }
            }
        }
    }
    Ok(())
}

/// Verifies that `c` is even, closed and commutes with every element of `basis`.
pub fn check_central<A: SuperAlgebra>(
    a: &A,
    c: &Elem<A::Basis>,
    basis: &[A::Basis],
) -> Result<(), AxiomError> {
    let name = || format!("{c:?}");
    if c.keys().any(|b| a.parity(b) != 0) {
        return Err(AxiomError::NotEven(name()));
    }
    if !a.diff_elem(c).is_zero() {
        return Err(AxiomError::NotClosed(name()));
    }
    for x in basis {
        let ex = Lin::basis(x.clone());
        if a.mul_elems(c, &ex) != a.mul_elems(&ex, c) {
            return Err(AxiomError::NotCentral(name(), a.label(x)));
        }
    }
    Ok(())
}
