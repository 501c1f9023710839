use super::{check_axioms, check_central, AxiomError, Central, Elem, EndP, SuperAlgebra};
use crate::exact::{Lin, Rational};

/// Finite-dimensional dg algebra given by structure constants on basis
/// indices `0..dim`; index 0 is the unit.
#[derive(Clone, Debug)]
pub struct FiniteDga {
    pub name: String,
    labels: Vec<String>,
    parities: Vec<u8>,
    weights: Vec<i64>,
    table: Vec<Vec<Elem<usize>>>,
    diff: Vec<Elem<usize>>,
    centrals: Vec<Central<usize>>,
}

impl FiniteDga {
    /// Builds from explicit tables and verifies all axioms.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        parities: Vec<u8>,
        table: Vec<Vec<Elem<usize>>>,
        diff: Vec<Elem<usize>>,
    ) -> Result<Self, AxiomError> {
        let dim = labels.len();
        assert_eq!(parities.len(), dim);
        assert_eq!(table.len(), dim);
        assert_eq!(diff.len(), dim);
        let a = FiniteDga {
            name: name.into(),
            labels,
            parities,
            weights: vec![0; dim],
            table,
            diff,
            centrals: Vec::new(),
        };
        check_axioms(&a, &a.basis())?;
        Ok(a)
    }

    /// Builds from a product/differential oracle on basis indices.
    pub fn from_fns(
        name: impl Into<String>,
        labels: Vec<String>,
        parities: Vec<u8>,
        mul: impl Fn(usize, usize) -> Elem<usize>,
        diff: impl Fn(usize) -> Elem<usize>,
    ) -> Result<Self, AxiomError> {
        let dim = labels.len();
        let table = (0..dim).map(|i| (0..dim).map(|j| mul(i, j)).collect()).collect();
        let d = (0..dim).map(diff).collect();
        Self::new(name, labels, parities, table, d)
    }

    pub fn with_central(mut self, name: impl Into<String>, elem: Elem<usize>) -> Result<Self, AxiomError> {
        check_central(&self, &elem, &self.basis())?;
        self.centrals.push(Central { name: name.into(), elem });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn basis(&self) -> Vec<usize> {
        (0..self.dim()).collect()
    }

    pub fn centrals(&self) -> &[Central<usize>] {
        &self.centrals
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Same algebra with the differential switched off.
    pub fn without_differential(&self) -> FiniteDga {
        let mut a = self.clone();
        a.diff = vec![Lin::new(); self.dim()];
        a.name = format!("{} (d=0)", self.name);
        a
    }

    /// Exterior algebra on `k` odd generators with zero differential.
    pub fn exterior(k: usize) -> FiniteDga {
        let dim = 1usize << k;
        let labels = (0..dim)
            .map(|m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    (0..k).filter(|i| m & (1 << i) != 0).map(|i| format!("e{}", i + 1)).collect()
                }
            })
            .collect();
        let parities = (0..dim).map(|m: usize| (m.count_ones() % 2) as u8).collect();
        let mul = |a: usize, b: usize| {
            if a & b != 0 {
                return Lin::new();
            }
            // sign of moving each generator of b past the higher generators of a
            let mut swaps = 0;
            for j in 0..k {
                if b & (1 << j) != 0 {
                    swaps += (a >> (j + 1)).count_ones();
                }
            }
            Lin::single(a | b, Rational::sign(swaps as usize))
        };
        let mut a = FiniteDga::from_fns(format!("exterior({k})"), labels, parities, mul, |_| Lin::new())
            .expect("exterior algebra axioms");
        if k >= 2 {
            a = a.with_central("e1e2", Lin::basis(0b11)).expect("even products are central");
        }
        a
    }

    /// `End P_n` with `d = [D, -]` for `D = sum a_i theta_i + b_i dtheta_i`,
    /// whose square is the scalar `sum a_i b_i`.
    pub fn twisted_endp(n: usize, a: &[i64], b: &[i64]) -> FiniteDga {
        let e = EndP::new(n).expect("End P_n size");
        let mut dvec: Elem<usize> = Lin::new();
        for i in 0..n {
            dvec.add(e.theta(i), Rational::from(a[i]));
            dvec.add(e.dtheta(i), Rational::from(b[i]));
        }
        let labels = (0..e.dim()).map(|i| e.label(i)).collect();
        let parities = (0..e.dim()).map(|i| e.parity(i)).collect();
        let diff = |x: usize| {
            let mut out = Lin::new();
            let sx = Rational::sign(e.parity(x) as usize);
            for (g, c) in &dvec {
                out.add_scaled(&e.mul_lin(*g, x), c);
                out.add_scaled(&e.mul_lin(x, *g), &-(c * &sx));
            }
            out
        };
        FiniteDga::from_fns(format!("End P_{n} twisted"), labels, parities, |x, y| e.mul_lin(x, y), diff)
            .expect("End P_n axioms")
    }

    /// `k[y]/(y^2) (x) Lambda(xi)` with `d xi = y`; basis 1, y, xi, y xi.
    pub fn dual_numbers_koszul() -> FiniteDga {
        let labels = ["1", "y", "xi", "yxi"].map(String::from).to_vec();
        let parities = vec![0, 0, 1, 1];
        // encode as bitmask: bit0 = y, bit1 = xi
        let mul = |a: usize, b: usize| {
            if a & b != 0 {
                return Lin::new();
            }
            Lin::basis(a | b)
        };
        let diff = |x: usize| match x {
            2 => Lin::basis(1),
            _ => Lin::new(),
        };
        FiniteDga::from_fns("dual numbers with d xi = y", labels, parities, mul, diff)
            .expect("axioms")
            .with_central("y", Lin::basis(1))
            .expect("y is central")
    }

    /// `(Q x Q) (x) Lambda(xi)` with a central idempotent; basis
    /// 1, e, xi, e xi where `e` is the idempotent.
    pub fn split_idempotent() -> FiniteDga {
        let labels = ["1", "e", "xi", "exi"].map(String::from).to_vec();
        let parities = vec![0, 0, 1, 1];
        let mul = |a: usize, b: usize| {
            if a & b & 2 != 0 {
                return Lin::new();
            }
            Lin::basis(a | b)
        };
        FiniteDga::from_fns("idempotent split", labels, parities, mul, |_| Lin::new())
            .expect("axioms")
            .with_central("e", Lin::basis(1))
            .expect("idempotent is central")
    }

    /// Graded tensor product, with all centrals of both factors transported.
    pub fn tensor(x: &FiniteDga, y: &FiniteDga) -> FiniteDga {
        let (dx, dy) = (x.dim(), y.dim());
        let enc = |i: usize, j: usize| i * dy + j;
        let labels = (0..dx * dy)
            .map(|k| format!("{}(x){}", x.labels[k / dy], y.labels[k % dy]))
            .collect();
        let parities = (0..dx * dy).map(|k| (x.parities[k / dy] + y.parities[k % dy]) % 2).collect();
        let mul = |a: usize, b: usize| {
            let (a1, a2, b1, b2) = (a / dy, a % dy, b / dy, b % dy);
            let s = Rational::sign((y.parities[a2] * x.parities[b1]) as usize);
            let mut out = Lin::new();
            for (p, c) in &x.table[a1][b1] {
                for (q, e) in &y.table[a2][b2] {
                    out.add(enc(*p, *q), &(c * e) * &s);
                }
            }
            out
        };
        let diff = |a: usize| {
            let (a1, a2) = (a / dy, a % dy);
            let mut out = Lin::new();
            for (p, c) in &x.diff[a1] {
                out.add(enc(*p, a2), c.clone());
            }
            let s = Rational::sign(x.parities[a1] as usize);
            for (q, c) in &y.diff[a2] {
                out.add(enc(a1, *q), c * &s);
            }
            out
        };
        let mut t = FiniteDga::from_fns(format!("{} (x) {}", x.name, y.name), labels, parities, mul, diff)
            .expect("tensor product axioms");
        for c in &x.centrals {
            let e = c.elem.map_keys(|&i| enc(i, 0));
            t = t.with_central(format!("{}(x)1", c.name), e).expect("central");
        }
        for c in &y.centrals {
            let e = c.elem.map_keys(|&j| enc(0, j));
            t = t.with_central(format!("1(x){}", c.name), e).expect("central");
        }
        t
    }
}

impl SuperAlgebra for FiniteDga {
    type Basis = usize;

    fn unit(&self) -> usize {
        0
    }

    fn parity(&self, b: &usize) -> u8 {
        self.parities[*b]
    }

    fn weight(&self, b: &usize) -> i64 {
        self.weights[*b]
    }

    fn mul(&self, x: &usize, y: &usize) -> Elem<usize> {
        self.table[*x][*y].clone()
    }

    fn diff(&self, x: &usize) -> Elem<usize> {
        self.diff[*x].clone()
    }

    fn label(&self, b: &usize) -> String {
        self.labels[*b].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_two_generators() {
        let a = FiniteDga::exterior(2);
        assert_eq!(a.dim(), 4);
        assert_eq!(a.mul(&2, &1), Lin::single(3, Rational::from(-1)));
        assert_eq!(a.centrals().len(), 1);
    }

    #[test]
    fn twisted_endp_has_closed_unit_and_is_dga() {
        let a = FiniteDga::twisted_endp(2, &[1, 2], &[3, -1]);
        assert_eq!(a.dim(), 16);
        assert!(a.diff(&0).is_zero());
    }

    #[test]
    fn tensor_with_koszul() {
        let t = FiniteDga::tensor(&FiniteDga::exterior(2), &FiniteDga::dual_numbers_koszul());
        assert_eq!(t.dim(), 16);
        assert_eq!(t.centrals().len(), 2);
    }
}
