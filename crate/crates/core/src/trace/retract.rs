//! Deformation retract `(p, i, h)` of a weight-graded dg algebra onto its
//! cohomology, built piece by piece and memoized.
//!
//! A piece is a pair `(weight, parity)`. The differential maps the piece
//! `(w, q)` to `(w + s, 1 - q)`. Each piece is split as
//! `image ⊕ harmonic ⊕ complement`, where `image = d(complement of the
//! previous piece)`; `h` inverts `d` from the image back to that complement.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use crate::dga::{Elem, FiniteDga, MfAlgebra, SuperAlgebra};
use crate::exact::graded::kernel_and_complement;
use crate::exact::{Lin, PieceSplit, Rational, SVec, SparseMatrix};

/// A dg algebra with finite-dimensional weight pieces and a homogeneous
/// differential of weight `d_shift`.
pub trait GradedAlgebra: SuperAlgebra {
    fn basis_of_weight(&self, w: i64) -> Vec<Self::Basis>;
    fn d_shift(&self) -> i64;
    /// Weights outside this range are expected to carry no cohomology.
    fn default_window(&self) -> (i64, i64);
    fn default_margin(&self) -> i64;
}

impl GradedAlgebra for FiniteDga {
    fn basis_of_weight(&self, w: i64) -> Vec<usize> {
        if w == 0 { self.basis() } else { Vec::new() }
    }
    fn d_shift(&self) -> i64 {
        0
    }
    fn default_window(&self) -> (i64, i64) {
        (0, 0)
    }
    fn default_margin(&self) -> i64 {
        0
    }
}

impl GradedAlgebra for MfAlgebra {
    fn basis_of_weight(&self, w: i64) -> Vec<Self::Basis> {
        MfAlgebra::basis_of_weight(self, w)
    }
    fn d_shift(&self) -> i64 {
        self.shift()
    }
    fn default_window(&self) -> (i64, i64) {
        let spread = self.n() as i64 * self.shift();
        (-spread, self.weights().socle_weight() + spread)
    }
    fn default_margin(&self) -> i64 {
        self.weights().total()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RetractError {
    #[error("window too small: cohomology at weight {0} inside the margin band")]
    WindowTooSmall(i64),
    #[error("not a differential at weight {0}")]
    NotADifferential(i64),
    #[error("cohomology found at weight {0} outside the window")]
    Escaped(i64),
}

type Key = (i64, u8);

struct Piece<B> {
    basis: Vec<B>,
    index: HashMap<B, usize>,
    split: PieceSplit,
    /// Complement vectors of the previous piece, matching `split.image`.
    prev_complement: Vec<SVec>,
    prev_basis: Vec<B>,
    /// Global cohomology index of the first harmonic vector, if in the window.
    ha_offset: Option<usize>,
}

pub struct Retract<'a, A: GradedAlgebra> {
    a: &'a A,
    window: (i64, i64),
    margin: i64,
    pieces: RwLock<HashMap<Key, Arc<Piece<A::Basis>>>>,
    /// `(weight, parity, local harmonic index)` of each cohomology basis vector.
    ha: Vec<(i64, u8, usize)>,
    escaped: AtomicBool,
    escaped_at: RwLock<Option<i64>>,
}

impl<'a, A: GradedAlgebra> Retract<'a, A> {
    pub fn new(a: &'a A) -> Result<Self, RetractError> {
        let (lo, hi) = a.default_window();
        Self::with_window(a, (lo, hi), a.default_margin())
    }

    /// Builds the retract; fails when cohomology appears in the margin band
    /// around the window.
    pub fn with_window(a: &'a A, window: (i64, i64), margin: i64) -> Result<Self, RetractError> {
        let mut r = Retract {
            a,
            window,
            margin,
            pieces: RwLock::new(HashMap::new()),
            ha: Vec::new(),
            escaped: AtomicBool::new(false),
            escaped_at: RwLock::new(None),
        };
        let mut ha = Vec::new();
        for w in window.0 - margin..=window.1 + margin {
            for q in 0..2u8 {
                let piece = r.build((w, q))?;
                let nk = piece.split.harmonic.len();
                if nk == 0 {
                    continue;
                }
                if w < window.0 || w > window.1 {
                    return Err(RetractError::WindowTooSmall(w));
                }
                let mut piece = piece;
                piece.ha_offset = Some(ha.len());
                for j in 0..nk {
                    ha.push((w, q, j));
                }
                r.pieces.write().unwrap().insert((w, q), Arc::new(piece));
            }
        }
        r.ha = ha;
        Ok(r)
    }

    pub fn algebra(&self) -> &'a A {
        self.a
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn margin(&self) -> i64 {
        self.margin
    }

    fn piece_basis(&self, (w, q): Key) -> Vec<A::Basis> {
        self.a.basis_of_weight(w).into_iter().filter(|b| self.a.parity(b) == q).collect()
    }

    fn d_matrix(&self, src: &[A::Basis], dst_index: &HashMap<A::Basis, usize>, rows: usize, w: i64) -> Result<SparseMatrix, RetractError> {
        let mut m = SparseMatrix::new(rows, src.len());
        for (j, b) in src.iter().enumerate() {
            for (t, c) in &self.a.diff(b) {
                let Some(&i) = dst_index.get(t) else {
                    return Err(RetractError::NotADifferential(w));
                };
                m.add_to(i, j, c);
            }
        }
        Ok(m)
    }

    fn index_of(basis: &[A::Basis]) -> HashMap<A::Basis, usize> {
        basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect()
    }

    fn build(&self, key: Key) -> Result<Piece<A::Basis>, RetractError> {
        let s = self.a.d_shift();
        let (w, q) = key;
        let basis = self.piece_basis(key);
        let index = Self::index_of(&basis);
        let next = self.piece_basis((w + s, 1 - q));
        let d_out = self.d_matrix(&basis, &Self::index_of(&next), next.len(), w)?;
        let prev_basis = self.piece_basis((w - s, 1 - q));
        let d_in = self.d_matrix(&prev_basis, &index, basis.len(), w - s)?;
        let (_, prev_complement) = kernel_and_complement(&d_in);
        if !d_out.mul(&d_in).is_zero() {
            return Err(RetractError::NotADifferential(w));
        }
        let image: Vec<SVec> = prev_complement.iter().map(|c| d_in.mul_svec(c)).collect();
        let (kernel, complement) = kernel_and_complement(&d_out);
        let split = PieceSplit::assemble(basis.len(), &kernel, complement, image);
        Ok(Piece { basis, index, split, prev_complement, prev_basis, ha_offset: None })
    }

    fn piece(&self, key: Key) -> Arc<Piece<A::Basis>> {
        if let Some(p) = self.pieces.read().unwrap().get(&key) {
            return p.clone();
        }
        let piece = self.build(key).expect("differential is homogeneous");
        if !piece.split.harmonic.is_empty() {
            self.escaped.store(true, Ordering::SeqCst);
            *self.escaped_at.write().unwrap() = Some(key.0);
        }
        let arc = Arc::new(piece);
        self.pieces.write().unwrap().entry(key).or_insert(arc).clone()
    }

    /// Error if some evaluation touched cohomology outside the window.
    pub fn check_escape(&self) -> Result<(), RetractError> {
        if self.escaped.load(Ordering::SeqCst) {
            Err(RetractError::Escaped(self.escaped_at.read().unwrap().unwrap_or(0)))
        } else {
            Ok(())
        }
    }

    fn split_by_piece(&self, v: &Elem<A::Basis>) -> HashMap<Key, Elem<A::Basis>> {
        let mut out: HashMap<Key, Elem<A::Basis>> = HashMap::new();
        for (b, c) in v {
            out.entry((self.a.weight(b), self.a.parity(b))).or_default().add(b.clone(), c.clone());
        }
        out
    }

    fn coords(piece: &Piece<A::Basis>, v: &Elem<A::Basis>) -> SVec {
        let mut s: SVec = v.iter().map(|(b, c)| (piece.index[b], c.clone())).collect();
        s.sort_by_key(|(i, _)| *i);
        s
    }

    fn to_elem(basis: &[A::Basis], s: &SVec) -> Elem<A::Basis> {
        s.iter().map(|(i, c)| (basis[*i].clone(), c.clone())).collect()
    }

    pub fn ha_dim(&self) -> usize {
        self.ha.len()
    }

    pub fn ha_parity(&self, k: usize) -> u8 {
        self.ha[k].1
    }

    pub fn ha_weight(&self, k: usize) -> i64 {
        self.ha[k].0
    }

    /// `i(e_k)`.
    pub fn include(&self, k: usize) -> Elem<A::Basis> {
        let (w, q, j) = self.ha[k];
        let p = self.piece((w, q));
        Self::to_elem(&p.basis, &p.split.harmonic[j])
    }

    /// `p(v)` as coordinates on the cohomology basis.
    pub fn project(&self, v: &Elem<A::Basis>) -> Lin<usize> {
        let mut out = Lin::new();
        for (key, part) in self.split_by_piece(v) {
            let p = self.piece(key);
            let (_, k, _) = p.split.split_coords(&Self::coords(&p, &part));
            if let Some(off) = p.ha_offset {
                for (j, c) in k {
                    out.add(off + j, c);
                }
            }
        }
        out
    }

    /// `h(v)`, of weight `-s` and odd.
    pub fn homotopy(&self, v: &Elem<A::Basis>) -> Elem<A::Basis> {
        let mut out = Lin::new();
        for (key, part) in self.split_by_piece(v) {
            let p = self.piece(key);
            let (img, _, _) = p.split.split_coords(&Self::coords(&p, &part));
            for (j, c) in img {
                for (i, x) in &p.prev_complement[j] {
                    out.add(p.prev_basis[*i].clone(), x * &c);
                }
            }
        }
        out
    }

    /// Supertrace over the cohomology of `v -> p(f(i(v)))`.
    pub fn supertrace(&self, f: impl Fn(&Elem<A::Basis>) -> Elem<A::Basis>) -> Rational {
        let mut acc = Rational::zero();
        for k in 0..self.ha_dim() {
            let c = self.project(&f(&self.include(k))).get(&k);
            if !c.is_zero() {
                acc += &(&c * &Rational::sign(self.ha_parity(k) as usize));
            }
        }
        acc
    }

    /// Checks the retract identities and side conditions on every basis
    /// vector of the window and margin band.
    pub fn verify(&self) -> Result<(), String> {
        let d = |v: &Elem<A::Basis>| self.a.diff_elem(v);
        let ip = |v: &Elem<A::Basis>| {
            let mut out = Lin::new();
            for (k, c) in &self.project(v) {
                out.add_scaled(&self.include(*k), c);
            }
            out
        };
        for w in self.window.0 - self.margin..=self.window.1 + self.margin {
            for x in self.a.basis_of_weight(w) {
                let v = Lin::basis(x.clone());
                if !self.project(&d(&v)).is_zero() {
                    return Err(format!("pd != 0 on {x:?}"));
                }
                let hv = self.homotopy(&v);
                if !self.project(&hv).is_zero() {
                    return Err(format!("ph != 0 on {x:?}"));
                }
                if !self.homotopy(&hv).is_zero() {
                    return Err(format!("h^2 != 0 on {x:?}"));
                }
                let mut r = ip(&v).minus(&v);
                r.add_lin(&d(&hv));
                r.add_lin(&self.homotopy(&d(&v)));
                if !r.is_zero() {
                    return Err(format!("ip != 1 - dh - hd on {x:?}"));
                }
            }
        }
        for k in 0..self.ha_dim() {
            let e = self.include(k);
            if !d(&e).is_zero() {
                return Err(format!("di != 0 on class {k}"));
            }
            if !self.homotopy(&e).is_zero() {
                return Err(format!("hi != 0 on class {k}"));
            }
            if self.project(&e) != Lin::basis(k) {
                return Err(format!("pi != 1 on class {k}"));
            }
        }
        self.check_escape().map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::FiniteDga;
    use crate::poly::{WPoly, WeightSystem};

    #[test]
    fn zero_differential_keeps_everything() {
        let a = FiniteDga::exterior(2);
        let r = Retract::new(&a).unwrap();
        assert_eq!(r.ha_dim(), 4);
        assert!(r.homotopy(&Lin::basis(3)).is_zero());
        r.verify().unwrap();
    }

    #[test]
    fn acyclic_pair_is_contracted() {
        // basis 1, y, xi, y xi with d xi = y
        let a = FiniteDga::dual_numbers_koszul();
        let r = Retract::new(&a).unwrap();
        assert_eq!(r.ha_dim(), 2);
        assert_eq!(r.homotopy(&Lin::basis(1)), Lin::basis(2));
        assert!(r.project(&Lin::basis(1)).is_zero());
        r.verify().unwrap();
    }

    #[test]
    fn quadratic_factorization_has_two_classes() {
        let ws = WeightSystem::new(vec![1], 2).unwrap();
        let f = WPoly::monomial(vec![2]);
        let a = MfAlgebra::new(&f, &ws, None).unwrap();
        let r = Retract::new(&a).unwrap();
        assert_eq!(r.ha_dim(), 2);
        let parities: Vec<u8> = (0..2).map(|k| r.ha_parity(k)).collect();
        assert!(parities.contains(&0) && parities.contains(&1));
        r.verify().unwrap();
    }

    #[test]
    fn narrow_window_is_rejected() {
        let ws = WeightSystem::new(vec![1], 3).unwrap();
        let f = WPoly::monomial(vec![3]);
        let a = MfAlgebra::new(&f, &ws, None).unwrap();
        let full = Retract::new(&a).unwrap();
        let w = full.ha_weight(full.ha_dim() - 1);
        assert!(matches!(Retract::with_window(&a, (w - 100, w - 1), 4), Err(RetractError::WindowTooSmall(_))));
    }
}
