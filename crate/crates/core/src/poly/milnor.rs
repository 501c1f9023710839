use std::collections::{BTreeMap, HashMap};

use super::wpoly::{hessian, Exponent, WPoly, WeightSystem};
use crate::exact::matrix::{Echelon, SVec};
use crate::exact::{Rational, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MilnorError {
    #[error("not quasi-homogeneous: f is not of weight {0}")]
    NotQuasiHomogeneous(i64),
    #[error("non-isolated singularity: quotient at weight {weight} has dimension {found}, expected {expected}")]
    NonIsolated { weight: i64, expected: i64, found: i64 },
    #[error("non-isolated singularity: hessian vanishes in the Milnor algebra")]
    DegenerateHessian,
}

/// Per-weight reduction table. Columns are the weight's monomials in
/// decreasing lex order, so elimination pivots on the lex-largest monomial.
#[derive(Clone, Debug)]
struct WeightTable {
    monomials: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    ideal: Echelon,
    /// Non-pivot columns, which index the quotient basis.
    free: Vec<usize>,
}

impl WeightTable {
    fn new(ws: &WeightSystem, partials: &[(i64, WPoly)], w: i64) -> Self {
        let mut monomials = ws.monomials_of_weight(w);
        monomials.reverse();
        let index: HashMap<Exponent, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut ideal = Echelon::new();
        for (pw, p) in partials {
            for m in ws.monomials_of_weight(w - pw) {
                let g = p.mul_monomial(&m);
                let mut v: SVec = g.terms().map(|(e, c)| (index[e], c.clone())).collect();
                v.sort_by_key(|t| t.0);
                ideal.insert(v);
            }
        }
        let free = (0..monomials.len()).filter(|&j| !ideal.is_pivot(j)).collect();
        WeightTable { monomials, index, ideal, free }
    }
}

/// Milnor algebra of a quasi-homogeneous `f` with its residue normalization.
#[derive(Clone, Debug)]
pub struct MilnorData {
    f: WPoly,
    ws: WeightSystem,
    tables: BTreeMap<i64, WeightTable>,
    basis: Vec<Exponent>,
    basis_weight: Vec<i64>,
    /// (weight, column) -> basis index
    locate: HashMap<(i64, usize), usize>,
    socle_index: usize,
    hess: WPoly,
    hess_coord: Rational,
}

/// Coefficients of `prod_i (t^(W - w_i) - 1) / (t^(w_i) - 1)` up to `t^max`.
pub fn poincare_coefficients(ws: &WeightSystem, max: i64) -> Vec<i64> {
    let len = (max + 1) as usize;
    let mut series = vec![0i64; len];
    series[0] = 1;
    for &w in ws.weights() {
        let a = (ws.total() - w) as usize;
        for k in (a..len).rev() {
            series[k] -= series[k - a];
        }
        let b = w as usize;
        for k in b..len {
            series[k] += series[k - b];
        }
    }
    series
}

pub fn milnor_data(f: &WPoly, ws: &WeightSystem) -> Result<MilnorData, MilnorError> {
    if f.weight(ws) != Some(ws.total()) {
        return Err(MilnorError::NotQuasiHomogeneous(ws.total()));
    }
    let n = ws.n();
    let partials: Vec<(i64, WPoly)> =
        (0..n).map(|i| (ws.total() - ws.weight(i), f.derivative(i))).collect();
    let sigma = ws.socle_weight();
    let band = sigma + ws.weights().iter().max().copied().unwrap_or(0);
    let expected = poincare_coefficients(ws, band);

    let mut tables = BTreeMap::new();
    let mut basis = Vec::new();
    let mut basis_weight = Vec::new();
    let mut locate = HashMap::new();
    for w in 0..=band {
        let t = WeightTable::new(ws, &partials, w);
        let found = t.free.len() as i64;
        if found != expected[w as usize] {
            return Err(MilnorError::NonIsolated { weight: w, expected: expected[w as usize], found });
        }
        for &j in &t.free {
            locate.insert((w, j), basis.len());
            basis.push(t.monomials[j].clone());
            basis_weight.push(w);
        }
        if w <= sigma {
            tables.insert(w, t);
        }
    }
    let socle: Vec<usize> = (0..basis.len()).filter(|&i| basis_weight[i] == sigma).collect();
    if socle.len() != 1 {
        return Err(MilnorError::NonIsolated {
            weight: sigma,
            expected: 1,
            found: socle.len() as i64,
        });
    }
    let mut md = MilnorData {
        f: f.clone(),
        ws: ws.clone(),
        tables,
        basis,
        basis_weight,
        locate,
        socle_index: socle[0],
        hess: hessian(f),
        hess_coord: Rational::zero(),
    };
    let hc = md.normal_form(&md.hess.clone())[md.socle_index].clone();
    if hc.is_zero() {
        return Err(MilnorError::DegenerateHessian);
    }
    md.hess_coord = hc;
    Ok(md)
}

impl MilnorData {
    pub fn f(&self) -> &WPoly {
        &self.f
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.ws
    }

    pub fn mu(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Exponent] {
        &self.basis
    }

    pub fn basis_poly(&self, i: usize) -> WPoly {
        WPoly::monomial(self.basis[i].clone())
    }

    pub fn basis_weight(&self, i: usize) -> i64 {
        self.basis_weight[i]
    }

    pub fn socle_weight(&self) -> i64 {
        self.ws.socle_weight()
    }

    pub fn socle_index(&self) -> usize {
        self.socle_index
    }

    pub fn hessian(&self) -> &WPoly {
        &self.hess
    }

    /// Coordinate of the Hessian class on the socle basis monomial.
    pub fn hessian_coordinate(&self) -> &Rational {
        &self.hess_coord
    }

    /// Coordinates of the class of `g` in the monomial basis.
    pub fn normal_form(&self, g: &WPoly) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.mu()];
        for (w, comp) in g.components(&self.ws) {
            let Some(t) = self.tables.get(&w) else { continue };
            let mut v: SVec = comp.terms().map(|(e, c)| (t.index[e], c.clone())).collect();
            v.sort_by_key(|x| x.0);
            for (j, c) in t.ideal.reduce(&v) {
                out[self.locate[&(w, j)]] = c;
            }
        }
        out
    }

    pub fn expand(&self, coords: &[Rational]) -> WPoly {
        let mut p = WPoly::zero(self.ws.n());
        for (e, c) in self.basis.iter().zip(coords) {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    /// Residue pairing, normalized so that `res(1, hess f) = mu`.
    pub fn residue_pairing(&self, a: &WPoly, b: &WPoly) -> Rational {
        let nf = self.normal_form(&(a * b));
        &(&nf[self.socle_index] / &self.hess_coord) * &Rational::from(self.mu())
    }

    pub fn residue_gram(&self) -> SparseMatrix {
        let mut m = SparseMatrix::new(self.mu(), self.mu());
        for i in 0..self.mu() {
            for j in 0..self.mu() {
                m.set(i, j, self.residue_pairing(&self.basis_poly(i), &self.basis_poly(j)));
            }
        }
        m
    }
}

pub fn normal_form(g: &WPoly, md: &MilnorData) -> Vec<Rational> {
    md.normal_form(g)
}

pub fn residue_pairing(a: &WPoly, b: &WPoly, md: &MilnorData) -> Rational {
    md.residue_pairing(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn xn(n: u32) -> (WPoly, WeightSystem) {
        (WPoly::monomial(vec![n]), WeightSystem::new(vec![1], n as i64).unwrap())
    }

    #[test]
    fn cubic_basis() {
        let (f, ws) = xn(3);
        let md = milnor_data(&f, &ws).unwrap();
        assert_eq!(md.basis(), &[vec![0], vec![1]]);
        assert!(md.normal_form(&WPoly::monomial(vec![2])).iter().all(|c| c.is_zero()));
        assert_eq!(md.residue_pairing(&WPoly::one(1), &WPoly::one(1)), Rational::zero());
    }

    #[test]
    fn quadric_residue() {
        let (f, ws) = xn(2);
        let md = milnor_data(&f, &ws).unwrap();
        assert_eq!(md.mu(), 1);
        assert_eq!(md.residue_pairing(&WPoly::one(1), &WPoly::one(1)), q(1, 2));
    }

    #[test]
    fn quartic_keeps_square() {
        let (f, ws) = xn(4);
        let md = milnor_data(&f, &ws).unwrap();
        let x = WPoly::var(1, 0);
        let nf = md.normal_form(&(&x * &x));
        assert_eq!(md.expand(&nf), WPoly::monomial(vec![2]));
    }

    #[test]
    fn non_isolated_rejected() {
        // x^2 y with weights (1, 2): singular along the y-axis.
        let f = WPoly::monomial(vec![2, 1]);
        let ws = WeightSystem::new(vec![1, 2], 4).unwrap();
        assert!(matches!(milnor_data(&f, &ws), Err(MilnorError::NonIsolated { .. })));
    }

    #[test]
    fn inhomogeneous_rejected() {
        let f = &WPoly::monomial(vec![3]) + &WPoly::monomial(vec![2]);
        let ws = WeightSystem::new(vec![1], 3).unwrap();
        assert!(matches!(milnor_data(&f, &ws), Err(MilnorError::NotQuasiHomogeneous(_))));
    }
}
