//! Models of `End A`.
//!
//! [`WordAlgebra`] is a presentation by words in `L_a R_b`, `h`, `i pi_k p`
//! and `d`, reduced by relations that hold for any retract with side
//! conditions. Words act lazily on vectors of `A`, so the trace can be
//! evaluated for infinite-dimensional `A`.
//!
//! [`RhoImage`] is the image of `A (x) A^op` in the finite matrix algebra
//! `End A`, for finite `A`; it is faithful, so chain-level identities in
//! `C_*(End A)` can be checked exactly.

use std::collections::HashMap;

use super::retract::{GradedAlgebra, Retract};
use crate::dga::{Elem, FiniteDga, Opposite, SuperAlgebra, Tensor};
use crate::exact::{matrix::Echelon, Lin, Rational, SVec, SparseMatrix};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom<B> {
    /// `L_a R_b`, never both units.
    M(B, B),
    /// The homotopy `h`.
    H,
    /// `i pi_k p`, the projector onto the `k`-th cohomology class.
    P(usize),
    /// The differential of `A` as an operator.
    D,
}

pub type Word<B> = Vec<Atom<B>>;

/// `L_a R_b (x)`, with `R_b(x) = (-1)^{|x||b|} x b`.
pub fn left_right<A: SuperAlgebra>(a: &A, l: &A::Basis, r: &A::Basis, v: &Elem<A::Basis>) -> Elem<A::Basis> {
    let mut out = Lin::new();
    let rp = a.parity(r) as usize;
    for (x, c) in v {
        let s = Rational::sign(rp * a.parity(x) as usize);
        let xr = if a.is_unit(r) { Lin::basis(x.clone()) } else { a.mul(x, r) };
        for (y, d) in &xr {
            let k = &(c * d) * &s;
            if a.is_unit(l) {
                out.add(y.clone(), k);
            } else {
                out.add_scaled(&a.mul(l, y), &k);
            }
        }
    }
    out
}

pub struct WordAlgebra<'r, 'a, A: GradedAlgebra> {
    pub r: &'r Retract<'a, A>,
}

impl<'r, 'a, A: GradedAlgebra> WordAlgebra<'r, 'a, A> {
    pub fn new(r: &'r Retract<'a, A>) -> Self {
        WordAlgebra { r }
    }

    fn a(&self) -> &'a A {
        self.r.algebra()
    }

    pub fn atom_parity(&self, t: &Atom<A::Basis>) -> usize {
        match t {
            Atom::M(x, y) => (self.a().parity(x) + self.a().parity(y)) as usize % 2,
            Atom::H | Atom::D => 1,
            Atom::P(_) => 0,
        }
    }

    pub fn atom_weight(&self, t: &Atom<A::Basis>) -> i64 {
        match t {
            Atom::M(x, y) => self.a().weight(x) + self.a().weight(y),
            Atom::H => -self.a().d_shift(),
            Atom::D => self.a().d_shift(),
            Atom::P(_) => 0,
        }
    }

    pub fn word_parity(&self, w: &[Atom<A::Basis>]) -> usize {
        w.iter().map(|t| self.atom_parity(t)).sum::<usize>() % 2
    }

    /// `rho` of an element of `A (x) A^op`, as atoms.
    pub fn rho(&self, x: &Elem<(A::Basis, A::Basis)>) -> Lin<Word<A::Basis>> {
        let a = self.a();
        let mut out = Lin::new();
        for ((l, r), c) in x {
            let w = if a.is_unit(l) && a.is_unit(r) { vec![] } else { vec![Atom::M(l.clone(), r.clone())] };
            out.add(w, c.clone());
        }
        out
    }

    /// Replacement for the adjacent pair `(s, t)`, or `None` if irreducible.
    fn pair_rule(&self, s: &Atom<A::Basis>, t: &Atom<A::Basis>) -> Option<Lin<Word<A::Basis>>> {
        use Atom::*;
        match (s, t) {
            (M(a, b), M(c, d)) => {
                let opp = Opposite(self.a());
                let ten = Tensor(self.a(), &opp);
                Some(self.rho(&ten.mul(&(a.clone(), b.clone()), &(c.clone(), d.clone()))))
            }
            (P(k), P(j)) => Some(if k == j { Lin::basis(vec![P(*k)]) } else { Lin::new() }),
            (D, P(_)) | (P(_), D) | (H, P(_)) | (P(_), H) | (H, H) | (D, D) => Some(Lin::new()),
            _ => None,
        }
    }

    /// Reduces a word to normal form.
    pub fn reduce(&self, w: Word<A::Basis>) -> Lin<Word<A::Basis>> {
        for k in 0..w.len().saturating_sub(1) {
            if let Some(rep) = self.pair_rule(&w[k], &w[k + 1]) {
                let mut out = Lin::new();
                for (mid, c) in &rep {
                    let mut v = w[..k].to_vec();
                    v.extend(mid.iter().cloned());
                    v.extend(w[k + 2..].iter().cloned());
                    out.add_scaled(&self.reduce(v), c);
                }
                return out;
            }
        }
        Lin::basis(w)
    }

    fn atom_diff(&self, t: &Atom<A::Basis>) -> Lin<Word<A::Basis>> {
        match t {
            Atom::M(x, y) => {
                let opp = Opposite(self.a());
                let ten = Tensor(self.a(), &opp);
                self.rho(&ten.diff(&(x.clone(), y.clone())))
            }
            Atom::H => {
                let mut out = Lin::basis(vec![]);
                for k in 0..self.r.ha_dim() {
                    out.add(vec![Atom::P(k)], -Rational::one());
                }
                out
            }
            Atom::P(_) | Atom::D => Lin::new(),
        }
    }

    pub fn apply_atom(&self, t: &Atom<A::Basis>, v: &Elem<A::Basis>) -> Elem<A::Basis> {
        match t {
            Atom::M(x, y) => left_right(self.a(), x, y, v),
            Atom::H => self.r.homotopy(v),
            Atom::P(k) => self.r.include(*k).scaled(&self.r.project(v).get(k)),
            Atom::D => self.a().diff_elem(v),
        }
    }

    pub fn apply_word(&self, w: &[Atom<A::Basis>], v: &Elem<A::Basis>) -> Elem<A::Basis> {
        let mut cur = v.clone();
        for t in w.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.apply_atom(t, &cur);
        }
        cur
    }
}

impl<A: GradedAlgebra> SuperAlgebra for WordAlgebra<'_, '_, A> {
    type Basis = Word<A::Basis>;

    fn unit(&self) -> Self::Basis {
        vec![]
    }

    fn parity(&self, w: &Self::Basis) -> u8 {
        self.word_parity(w) as u8
    }

    fn weight(&self, w: &Self::Basis) -> i64 {
        w.iter().map(|t| self.atom_weight(t)).sum()
    }

    fn mul(&self, x: &Self::Basis, y: &Self::Basis) -> Elem<Self::Basis> {
        let mut w = x.clone();
        w.extend(y.iter().cloned());
        self.reduce(w)
    }

    fn diff(&self, w: &Self::Basis) -> Elem<Self::Basis> {
        let mut out = Lin::new();
        let mut prefix = 0usize;
        for k in 0..w.len() {
            let s = Rational::sign(prefix);
            for (mid, c) in &self.atom_diff(&w[k]) {
                let mut v = w[..k].to_vec();
                v.extend(mid.iter().cloned());
                v.extend(w[k + 1..].iter().cloned());
                out.add_scaled(&self.reduce(v), &(c * &s));
            }
            prefix += self.atom_parity(&w[k]);
        }
        out
    }

    fn label(&self, w: &Self::Basis) -> String {
        if w.is_empty() {
            return "id".into();
        }
        let a = self.a();
        w.iter()
            .map(|t| match t {
                Atom::M(x, y) => format!("L({})R({})", a.label(x), a.label(y)),
                Atom::H => "h".into(),
                Atom::P(k) => format!("P{k}"),
                Atom::D => "d".into(),
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// The subalgebra `rho(A (x) A^op)` of the matrix algebra `End A` for a
/// finite dg algebra, with basis index 0 the identity.
pub struct RhoImage {
    dim: usize,
    parities: Vec<u8>,
    mats: Vec<SparseMatrix>,
    pivots: Vec<(usize, usize)>,
    coord_inv: SparseMatrix,
    table: Vec<Vec<Elem<usize>>>,
    diffs: Vec<Elem<usize>>,
    rho: HashMap<(usize, usize), Elem<usize>>,
}

fn operator_matrix(a: &FiniteDga, f: impl Fn(&Elem<usize>) -> Elem<usize>) -> SparseMatrix {
    let n = a.dim();
    let mut m = SparseMatrix::new(n, n);
    for j in 0..n {
        for (i, c) in &f(&Lin::basis(j)) {
            m.add_to(*i, j, c);
        }
    }
    m
}

fn flatten(m: &SparseMatrix) -> SVec {
    let n = m.cols();
    let mut v: SVec = m.entries().map(|(r, c, x)| (r * n + c, x.clone())).collect();
    v.sort_by_key(|(i, _)| *i);
    v
}

impl RhoImage {
    pub fn new(a: &FiniteDga) -> Self {
        let n = a.dim();
        let mut ech = Echelon::new();
        let mut mats = Vec::new();
        let mut parities = Vec::new();
        let mut all = vec![(None, SparseMatrix::identity(n), 0u8)];
        for x in 0..n {
            for y in 0..n {
                if x == 0 && y == 0 {
                    continue;
                }
                let m = operator_matrix(a, |v| left_right(a, &x, &y, v));
                all.push((Some((x, y)), m, (a.parity(&x) + a.parity(&y)) % 2));
            }
        }
        for (_, m, p) in &all {
            if ech.insert(flatten(m)).is_some() {
                mats.push(m.clone());
                parities.push(*p);
            }
        }
        let pivots: Vec<(usize, usize)> = ech.pivots().map(|k| (k / n, k % n)).collect();
        let r = mats.len();
        let mut sub = SparseMatrix::new(r, r);
        for (j, m) in mats.iter().enumerate() {
            for (i, &(pr, pc)) in pivots.iter().enumerate() {
                sub.set(i, j, m.get(pr, pc));
            }
        }
        let coord_inv = sub.inverse().expect("pivot minor is invertible");
        let mut img = RhoImage {
            dim: n,
            parities,
            mats,
            pivots,
            coord_inv,
            table: Vec::new(),
            diffs: Vec::new(),
            rho: HashMap::new(),
        };
        let dm = operator_matrix(a, |v| a.diff_elem(v));
        img.table = (0..r)
            .map(|i| (0..r).map(|j| img.coords(&img.mats[i].mul(&img.mats[j]))).collect())
            .collect();
        img.diffs = (0..r)
            .map(|i| {
                let m = &img.mats[i];
                let s = Rational::sign(img.parities[i] as usize);
                img.coords(&dm.mul(m).add(&m.mul(&dm).scale(&-s)))
            })
            .collect();
        for (key, m, _) in &all {
            let (x, y) = key.unwrap_or((0, 0));
            img.rho.insert((x, y), img.coords(m));
        }
        img
    }

    /// Coordinates of a matrix lying in the image.
    pub fn coords(&self, m: &SparseMatrix) -> Elem<usize> {
        let v: SVec = self
            .pivots
            .iter()
            .enumerate()
            .filter_map(|(i, &(r, c))| {
                let x = m.get(r, c);
                (!x.is_zero()).then_some((i, x))
            })
            .collect();
        let c = self.coord_inv.mul_svec(&v);
        let out: Elem<usize> = c.into_iter().collect();
        debug_assert!({
            let mut back = SparseMatrix::new(self.dim, self.dim);
            for (i, x) in &out {
                back = back.add(&self.mats[*i].scale(x));
            }
            back == *m
        });
        out
    }

    pub fn rank(&self) -> usize {
        self.mats.len()
    }

    /// `rho(x (x) y)` in image coordinates.
    pub fn rho(&self, x: usize, y: usize) -> &Elem<usize> {
        &self.rho[&(x, y)]
    }
}

impl SuperAlgebra for RhoImage {
    type Basis = usize;

    fn unit(&self) -> usize {
        0
    }

    fn parity(&self, b: &usize) -> u8 {
        self.parities[*b]
    }

    fn mul(&self, x: &usize, y: &usize) -> Elem<usize> {
        self.table[*x][*y].clone()
    }

    fn diff(&self, x: &usize) -> Elem<usize> {
        self.diffs[*x].clone()
    }

    fn label(&self, b: &usize) -> String {
        format!("m{b}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::check_axioms;

    #[test]
    fn word_algebra_axioms_on_small_words() {
        let a = FiniteDga::dual_numbers_koszul();
        let r = Retract::new(&a).unwrap();
        let wa = WordAlgebra::new(&r);
        let basis: Vec<Word<usize>> = vec![
            vec![],
            vec![Atom::M(2, 0)],
            vec![Atom::M(1, 2)],
            vec![Atom::H],
            vec![Atom::P(0)],
            vec![Atom::P(1)],
            vec![Atom::D],
            vec![Atom::H, Atom::M(2, 0)],
        ];
        check_axioms(&wa, &basis).unwrap();
    }

    #[test]
    fn rho_image_is_a_dg_algebra() {
        let a = FiniteDga::dual_numbers_koszul();
        let img = RhoImage::new(&a);
        let basis: Vec<usize> = (0..img.rank()).collect();
        check_axioms(&img, &basis).unwrap();
        // central y: L_y = R_y
        assert_eq!(img.rho(1, 0), img.rho(0, 1));
    }

    #[test]
    fn word_evaluation_respects_products() {
        let a = FiniteDga::exterior(2);
        let r = Retract::new(&a).unwrap();
        let wa = WordAlgebra::new(&r);
        let w1 = vec![Atom::M(1, 2)];
        let w2 = vec![Atom::M(2, 1)];
        let v = Lin::basis(0usize);
        let direct = wa.apply_word(&w1, &wa.apply_word(&w2, &v));
        let mut via = Lin::new();
        for (w, c) in &wa.mul(&w1, &w2) {
            via.add_scaled(&wa.apply_word(w, &v), c);
        }
        assert_eq!(direct, via);
    }
}
