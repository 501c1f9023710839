use super::{check_axioms, Central, Elem, EndP, FiniteDga, SuperAlgebra};
use crate::exact::{Lin, Rational, SVec};
use crate::poly::{Exponent, WPoly, WeightSystem};

/// Basis element `x^x (x) T` of `k[x] (x) End P_n`, `T` a normally ordered
/// monomial index of [`EndP`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MfBasis {
    pub x: Exponent,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MfError {
    #[error("not quasi-homogeneous")]
    NotQuasiHomogeneous,
    #[error("decomposition invalid: {0}")]
    DecompositionInvalid(String),
    #[error("{0}")]
    Size(String),
    #[error("D_f^2 != f")]
    Curvature,
}

/// The matrix-factorization dg algebra `A_f` with `d = [D_f, -]`,
/// optionally truncated modulo `(x)^m`.
#[derive(Clone, Debug)]
pub struct MfAlgebra {
    f: WPoly,
    ws: WeightSystem,
    parts: Vec<WPoly>,
    endp: EndP,
    theta_w: Vec<i64>,
    comm_theta: Vec<Vec<Elem<usize>>>,
    comm_dtheta: Vec<Vec<Elem<usize>>>,
    truncation: Option<u32>,
}

fn commutators(e: &EndP, g: usize) -> Vec<Elem<usize>> {
    (0..e.dim())
        .map(|t| {
            let mut out = e.mul_lin(g, t);
            let s = Rational::sign(e.parity(t) as usize);
            out.add_scaled(&e.mul_lin(t, g), &-s);
            out
        })
        .collect()
}

impl MfAlgebra {
    /// Builds `A_f` for `f = sum x_i f_i`; the default decomposition is
    /// `f_i = (w_i / W) d_i f`.
    pub fn new(f: &WPoly, ws: &WeightSystem, parts: Option<Vec<WPoly>>) -> Result<Self, MfError> {
        let n = ws.n();
        if f.nvars() != n || f.weight(ws) != Some(ws.total()) {
            return Err(MfError::NotQuasiHomogeneous);
        }
        let parts = match parts {
            Some(p) => p,
            None => (0..n)
                .map(|i| f.derivative(i).scale(&Rational::new(ws.weight(i), ws.total())))
                .collect(),
        };
        if parts.len() != n {
            return Err(MfError::DecompositionInvalid(format!("expected {n} components")));
        }
        let mut sum = WPoly::zero(n);
        for (i, p) in parts.iter().enumerate() {
            if !p.is_zero() && p.weight(ws) != Some(ws.total() - ws.weight(i)) {
                return Err(MfError::DecompositionInvalid(format!("f_{} has the wrong weight", i + 1)));
            }
            sum = &sum + &(&WPoly::var(n, i) * p);
        }
        if sum != *f {
            return Err(MfError::DecompositionInvalid("sum x_i f_i != f".into()));
        }
        let endp = EndP::new(n).map_err(|e| MfError::Size(e.to_string()))?;
        let theta_w = (0..n).map(|i| ws.weight(i) - ws.half()).collect();
        let comm_theta = (0..n).map(|i| commutators(&endp, endp.theta(i))).collect();
        let comm_dtheta = (0..n).map(|i| commutators(&endp, endp.dtheta(i))).collect();
        let a = MfAlgebra {
            f: f.clone(),
            ws: ws.clone(),
            parts,
            endp,
            theta_w,
            comm_theta,
            comm_dtheta,
            truncation: None,
        };
        let d2 = a.mul_elems(&a.d_element(), &a.d_element());
        if d2 != a.poly_elem(f, 0) {
            return Err(MfError::Curvature);
        }
        for g in a.generators() {
            if !a.diff_elem(&a.diff(&g)).is_zero() {
                return Err(MfError::Curvature);
            }
        }
        Ok(a)
    }

    /// Quotient by `(x)^m`; still a dg algebra since `d` never lowers x-degree.
    pub fn truncated(&self, m: u32) -> MfAlgebra {
        let mut a = self.clone();
        a.truncation = Some(m);
        a
    }

    pub fn f(&self) -> &WPoly {
        &self.f
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.ws
    }

    pub fn parts(&self) -> &[WPoly] {
        &self.parts
    }

    pub fn endp(&self) -> &EndP {
        &self.endp
    }

    pub fn n(&self) -> usize {
        self.ws.n()
    }

    /// Weight of `d`.
    pub fn shift(&self) -> i64 {
        self.ws.half()
    }

    fn keep(&self, x: &[u32]) -> bool {
        self.truncation.is_none_or(|m| x.iter().sum::<u32>() < m)
    }

    pub fn basis_elem(&self, x: Exponent, t: usize) -> MfBasis {
        MfBasis { x, t }
    }

    /// `g (x) T` as an element.
    pub fn poly_elem(&self, g: &WPoly, t: usize) -> Elem<MfBasis> {
        let mut out = Lin::new();
        for (e, c) in g.terms() {
            if self.keep(e) {
                out.add(MfBasis { x: e.clone(), t }, c.clone());
            }
        }
        out
    }

    /// `D_f = sum f_i theta_i + x_i dtheta_i`.
    pub fn d_element(&self) -> Elem<MfBasis> {
        let mut out = Lin::new();
        for i in 0..self.n() {
            out.add_lin(&self.poly_elem(&self.parts[i], self.endp.theta(i)));
            out.add_lin(&self.poly_elem(&WPoly::var(self.n(), i), self.endp.dtheta(i)));
        }
        out
    }

    pub fn theta(&self, i: usize) -> MfBasis {
        MfBasis { x: vec![0; self.n()], t: self.endp.theta(i) }
    }

    pub fn dtheta(&self, i: usize) -> MfBasis {
        MfBasis { x: vec![0; self.n()], t: self.endp.dtheta(i) }
    }

    pub fn x(&self, i: usize) -> MfBasis {
        let mut x = vec![0; self.n()];
        x[i] = 1;
        MfBasis { x, t: 0 }
    }

    fn generators(&self) -> Vec<MfBasis> {
        (0..self.n()).flat_map(|i| [self.theta(i), self.dtheta(i), self.x(i)]).collect()
    }

    /// Central closed even elements `x_j (x) 1`.
    pub fn centrals(&self) -> Vec<Central<MfBasis>> {
        (0..self.n())
            .filter(|&i| self.keep(&self.x(i).x))
            .map(|i| Central { name: format!("x{}", i + 1), elem: Lin::basis(self.x(i)) })
            .collect()
    }

    pub fn theta_weights(&self) -> &[i64] {
        &self.theta_w
    }

    /// All basis elements of weight `w` (x-monomials before truncation).
    pub fn basis_of_weight(&self, w: i64) -> Vec<MfBasis> {
        let mut out = Vec::new();
        for t in 0..self.endp.dim() {
            let rest = w - self.endp.weight(t, &self.theta_w);
            if rest < 0 {
                continue;
            }
            for x in self.ws.monomials_of_weight(rest) {
                if self.keep(&x) {
                    out.push(MfBasis { x, t });
                }
            }
        }
        out.sort();
        out
    }

    /// Basis of the truncation as a finite list (requires a truncation).
    pub fn finite_basis(&self) -> Vec<MfBasis> {
        let m = self.truncation.expect("finite basis needs a truncation");
        let mut monos = Vec::new();
        let mut cur = vec![0u32; self.n()];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            for a in 0..=left {
                cur[i] = a;
                rec(i + 1, left - a, cur, out);
            }
            cur[i] = 0;
        }
        if m > 0 {
            rec(0, m - 1, &mut cur, &mut monos);
        }
        let mut out: Vec<MfBasis> = monos
            .into_iter()
            .flat_map(|x| (0..self.endp.dim()).map(move |t| MfBasis { x: x.clone(), t }))
            .collect();
        out.sort();
        out
    }

    /// Finite dg algebra of the truncation, with centrals `x_j`.
    pub fn to_finite(&self) -> FiniteDga {
        let basis = self.finite_basis();
        let unit = MfBasis { x: vec![0; self.n()], t: 0 };
        let mut order = basis.clone();
        order.retain(|b| *b != unit);
        order.insert(0, unit);
        let index: std::collections::HashMap<MfBasis, usize> =
            order.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let to_idx = |e: Elem<MfBasis>| e.map_keys(|b| index[b]);
        let labels = order.iter().map(|b| self.label(b)).collect();
        let parities = order.iter().map(|b| self.parity(b)).collect();
        let name = format!("A_f/(x)^{} for f = {}", self.truncation.unwrap_or(0), self.f);
        let mut a = FiniteDga::from_fns(
            name,
            labels,
            parities,
            |i, j| to_idx(SuperAlgebra::mul(self, &order[i], &order[j])),
            |i| to_idx(self.diff(&order[i])),
        )
        .expect("truncated MF algebra axioms");
        for c in self.centrals() {
            a = a.with_central(c.name, to_idx(c.elem)).expect("x_j is central");
        }
        a
    }

    /// Verifies the dg algebra axioms on the given basis elements.
    pub fn check_on(&self, basis: &[MfBasis]) -> Result<(), super::AxiomError> {
        check_axioms(self, basis)
    }

    fn times_poly(&self, g: &WPoly, x: &[u32], t: &Elem<usize>, sign: &Rational, out: &mut Elem<MfBasis>) {
        for (e, c) in g.terms() {
            let xe: Exponent = e.iter().zip(x).map(|(a, b)| a + b).collect();
            if !self.keep(&xe) {
                continue;
            }
            let k = c * sign;
            for (s, v) in t {
                out.add(MfBasis { x: xe.clone(), t: *s }, &k * v);
            }
        }
    }
}

impl SuperAlgebra for MfAlgebra {
    type Basis = MfBasis;

    fn unit(&self) -> MfBasis {
        MfBasis { x: vec![0; self.n()], t: 0 }
    }

    fn parity(&self, b: &MfBasis) -> u8 {
        self.endp.parity(b.t)
    }

    fn weight(&self, b: &MfBasis) -> i64 {
        self.ws.monomial_weight(&b.x) + self.endp.weight(b.t, &self.theta_w)
    }

    fn mul(&self, a: &MfBasis, b: &MfBasis) -> Elem<MfBasis> {
        let x: Exponent = a.x.iter().zip(&b.x).map(|(p, q)| p + q).collect();
        if !self.keep(&x) {
            return Lin::new();
        }
        let prod: &SVec = self.endp.mul(a.t, b.t);
        prod.iter().map(|(t, c)| (MfBasis { x: x.clone(), t: *t }, c.clone())).collect()
    }

    fn diff(&self, a: &MfBasis) -> Elem<MfBasis> {
        let mut out = Lin::new();
        let one = Rational::one();
        for i in 0..self.n() {
            self.times_poly(&self.parts[i], &a.x, &self.comm_theta[i][a.t], &one, &mut out);
            self.times_poly(&WPoly::var(self.n(), i), &a.x, &self.comm_dtheta[i][a.t], &one, &mut out);
        }
        out
    }

    fn label(&self, b: &MfBasis) -> String {
        let xs: Vec<String> = b
            .x
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| {
                let v = if self.n() == 1 { "x".to_string() } else { format!("x{}", i + 1) };
                if a == 1 { v } else { format!("{v}^{a}") }
            })
            .collect();
        let t = self.endp.label(b.t);
        match (xs.is_empty(), b.t == 0) {
            (true, _) => t,
            (false, true) => xs.join(""),
            (false, false) => format!("{}*{}", xs.join(""), t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn x_pow(n: u32) -> MfAlgebra {
        let f = WPoly::monomial(vec![n]);
        let ws = WeightSystem::new(vec![1], n as i64).unwrap();
        MfAlgebra::new(&f, &ws, None).unwrap()
    }

    #[test]
    fn quadric_d_element() {
        let a = x_pow(2);
        let d = a.d_element();
        // D = (1/2)*2x*theta + x*dtheta = x(theta + dtheta)
        assert_eq!(d.get(&MfBasis { x: vec![1], t: 1 }), q(1, 1));
        assert_eq!(d.get(&MfBasis { x: vec![1], t: 2 }), q(1, 1));
        assert!(a.diff(&a.x(0)).is_zero());
    }

    #[test]
    fn cubic_d_theta_is_x() {
        let f = WPoly::monomial(vec![3]);
        let ws = WeightSystem::new(vec![2], 6).unwrap();
        let parts = vec![WPoly::monomial(vec![2])];
        let a = MfAlgebra::new(&f, &ws, Some(parts)).unwrap();
        assert_eq!(a.diff(&a.theta(0)), Lin::basis(a.x(0)));
    }

    #[test]
    fn truncation_dimension() {
        let a = x_pow(3).truncated(2);
        let fa = a.to_finite();
        assert_eq!(fa.dim(), 8);
    }

    #[test]
    fn bad_decomposition() {
        let f = WPoly::monomial(vec![3]);
        let ws = WeightSystem::new(vec![1], 3).unwrap();
        let r = MfAlgebra::new(&f, &ws, Some(vec![WPoly::monomial(vec![1])]));
        assert!(matches!(r, Err(MfError::DecompositionInvalid(_))));
    }

    #[test]
    fn d_has_half_total_weight() {
        let f = &WPoly::monomial(vec![3, 0]) + &WPoly::monomial(vec![0, 3]);
        let ws = WeightSystem::new(vec![1, 1], 3).unwrap();
        let a = MfAlgebra::new(&f, &ws, None).unwrap();
        for w in -4..6 {
            for b in a.basis_of_weight(w) {
                for (c, _) in &a.diff(&b) {
                    assert_eq!(a.weight(c), w + a.shift());
                }
            }
        }
        a.check_on(&a.basis_of_weight(0)).unwrap();
    }
}
