use std::collections::BTreeMap;

use super::matrix::{kernel_basis_sparse, svec_to_dense, DVec, Echelon, SVec, SparseMatrix};
use super::rational::Rational;

/// Finite-per-weight graded space: weight -> basis labels with parity bits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedSpace {
    pieces: BTreeMap<i64, Vec<(String, u8)>>,
}

impl GradedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a labelled basis vector; panics if the label is already present.
    pub fn push(&mut self, weight: i64, label: impl Into<String>, parity: u8) {
        let label = label.into();
        assert!(
            !self.pieces.values().flatten().any(|(l, _)| *l == label),
            "duplicate basis label {label}"
        );
        self.pieces.entry(weight).or_default().push((label, parity % 2));
    }

    pub fn dim(&self, weight: i64) -> usize {
        self.pieces.get(&weight).map_or(0, |v| v.len())
    }

    pub fn basis(&self, weight: i64) -> &[(String, u8)] {
        self.pieces.get(&weight).map_or(&[], |v| v.as_slice())
    }

    pub fn weights(&self) -> impl Iterator<Item = i64> + '_ {
        self.pieces.keys().copied()
    }

    pub fn total_dim(&self) -> usize {
        self.pieces.values().map(|v| v.len()).sum()
    }
}

/// A weight-homogeneous linear map on a graded space raising weight by
/// `shift`; the block at weight `w` has shape `dim(w + shift) x dim(w)`.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub space: GradedSpace,
    pub shift: i64,
    pub blocks: BTreeMap<i64, SparseMatrix>,
}

impl GradedMap {
    pub fn new(space: GradedSpace, shift: i64) -> Self {
        GradedMap { space, shift, blocks: BTreeMap::new() }
    }

    pub fn set_block(&mut self, weight: i64, m: SparseMatrix) {
        assert_eq!(m.cols(), self.space.dim(weight), "block source dimension");
        assert_eq!(m.rows(), self.space.dim(weight + self.shift), "block target dimension");
        self.blocks.insert(weight, m);
    }

    pub fn block(&self, weight: i64) -> SparseMatrix {
        self.blocks.get(&weight).cloned().unwrap_or_else(|| {
            SparseMatrix::new(self.space.dim(weight + self.shift), self.space.dim(weight))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("not a differential: d^2 != 0 at weight {0}")]
    NotADifferential(i64),
}

/// Decomposition `V = image ⊕ harmonic ⊕ complement` of one graded piece,
/// where `image ⊕ harmonic = ker d` and `d` maps `complement` isomorphically
/// onto the image in the next piece.
#[derive(Clone, Debug)]
pub struct PieceSplit {
    pub dim: usize,
    pub image: Vec<SVec>,
    pub harmonic: Vec<SVec>,
    pub complement: Vec<SVec>,
    coords: SparseMatrix,
}

/// Kernel of `d_out` and a complement to it spanned by standard basis
/// vectors chosen in increasing index order.
pub fn kernel_and_complement(d_out: &SparseMatrix) -> (Vec<SVec>, Vec<SVec>) {
    let kernel = kernel_basis_sparse(d_out);
    let mut ech = Echelon::new();
    for k in &kernel {
        ech.insert(k.clone());
    }
    let mut complement = Vec::new();
    for j in 0..d_out.cols() {
        let e = vec![(j, Rational::one())];
        if ech.insert(e.clone()).is_some() {
            complement.push(e);
        }
    }
    (kernel, complement)
}

impl PieceSplit {
    /// Completes a split from the kernel, its complement, and a basis of the
    /// incoming image (which must lie in the kernel).
    pub fn assemble(dim: usize, kernel: &[SVec], complement: Vec<SVec>, image: Vec<SVec>) -> Self {
        let mut ech = Echelon::new();
        for b in &image {
            let fresh = ech.insert(b.clone());
            debug_assert!(fresh.is_some(), "image basis is dependent");
        }
        let mut harmonic = Vec::new();
        for z in kernel {
            if ech.insert(z.clone()).is_some() {
                harmonic.push(z.clone());
            }
        }
        let cols: Vec<SVec> =
            image.iter().chain(harmonic.iter()).chain(complement.iter()).cloned().collect();
        assert_eq!(cols.len(), dim, "split does not span the piece");
        let coords = SparseMatrix::from_columns(dim, &cols)
            .inverse()
            .expect("adapted basis is invertible");
        PieceSplit { dim, image, harmonic, complement, coords }
    }

    /// Coordinates of `v` in the adapted basis (image, harmonic, complement).
    pub fn coordinates(&self, v: &SVec) -> SVec {
        self.coords.mul_svec(v)
    }

    /// The three components of `v` as coordinate slices
    /// `(image coords, harmonic coords, complement coords)`.
    pub fn split_coords(&self, v: &SVec) -> (SVec, SVec, SVec) {
        let c = self.coordinates(v);
        let nb = self.image.len();
        let nk = self.harmonic.len();
        let mut out = (Vec::new(), Vec::new(), Vec::new());
        for (i, x) in c {
            if i < nb {
                out.0.push((i, x));
            } else if i < nb + nk {
                out.1.push((i - nb, x));
            } else {
                out.2.push((i - nb - nk, x));
            }
        }
        out
    }

    fn projector(&self, range: std::ops::Range<usize>) -> SparseMatrix {
        let basis: Vec<&SVec> =
            self.image.iter().chain(self.harmonic.iter()).chain(self.complement.iter()).collect();
        let mut p = SparseMatrix::new(self.dim, self.dim);
        for j in 0..self.dim {
            let coords = self.coords.column(j);
            for (i, c) in coords {
                if range.contains(&i) {
                    for (r, x) in basis[i] {
                        p.add_to(*r, j, &(x * &c));
                    }
                }
            }
        }
        p
    }

    pub fn image_projector(&self) -> SparseMatrix {
        self.projector(0..self.image.len())
    }

    pub fn harmonic_projector(&self) -> SparseMatrix {
        let s = self.image.len();
        self.projector(s..s + self.harmonic.len())
    }

    pub fn complement_projector(&self) -> SparseMatrix {
        let s = self.image.len() + self.harmonic.len();
        self.projector(s..self.dim)
    }
}

/// Splits a finite weight-graded differential piece by piece.
///
/// The image basis at weight `w` is `d` applied to the chosen complement at
/// weight `w - shift`, so `d` restricted to complements is the identity
/// matrix in adapted coordinates.
pub fn split_differential(d: &GradedMap) -> Result<BTreeMap<i64, PieceSplit>, SplitError> {
    for w in d.space.weights() {
        let dd = d.block(w + d.shift).mul(&d.block(w));
        if !dd.is_zero() {
            return Err(SplitError::NotADifferential(w));
        }
    }
    let mut kc: BTreeMap<i64, (Vec<SVec>, Vec<SVec>)> = BTreeMap::new();
    for w in d.space.weights() {
        kc.insert(w, kernel_and_complement(&d.block(w)));
    }
    let mut out = BTreeMap::new();
    for w in d.space.weights() {
        let src = w - d.shift;
        let image: Vec<SVec> = match kc.get(&src) {
            Some((_, comp)) => {
                let blk = d.block(src);
                comp.iter().map(|c| blk.mul_svec(c)).collect()
            }
            None => Vec::new(),
        };
        let (kernel, complement) = kc[&w].clone();
        out.insert(w, PieceSplit::assemble(d.space.dim(w), &kernel, complement, image));
    }
    Ok(out)
}

/// Dense rendering of a sparse vector, for reports and tests.
pub fn dense(v: &SVec, len: usize) -> DVec {
    svec_to_dense(v, len)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_weight_space(a: usize, b: usize) -> GradedSpace {
        let mut s = GradedSpace::new();
        for i in 0..a {
            s.push(0, format!("a{i}"), 0);
        }
        for i in 0..b {
            s.push(1, format!("b{i}"), 1);
        }
        s
    }

    #[test]
    fn zero_differential_is_all_harmonic() {
        let d = GradedMap::new(two_weight_space(2, 1), 1);
        let sp = split_differential(&d).unwrap();
        assert_eq!(sp[&0].harmonic.len(), 2);
        assert!(sp[&0].image.is_empty() && sp[&0].complement.is_empty());
    }

    #[test]
    fn acyclic_two_term() {
        let mut d = GradedMap::new(two_weight_space(1, 1), 1);
        d.set_block(0, SparseMatrix::from_ints(&[&[1]]));
        let sp = split_differential(&d).unwrap();
        assert_eq!(sp[&0].complement.len(), 1);
        assert!(sp[&0].harmonic.is_empty());
        assert_eq!(sp[&1].image.len(), 1);
        assert!(sp[&1].harmonic.is_empty());
    }

    #[test]
    fn nilpotent_block_leaves_second_target_vector() {
        let mut d = GradedMap::new(two_weight_space(2, 2), 1);
        d.set_block(0, SparseMatrix::from_ints(&[&[0, 1], &[0, 0]]));
        let sp = split_differential(&d).unwrap();
        assert_eq!(sp[&1].harmonic, vec![vec![(1, Rational::one())]]);
        assert_eq!(sp[&0].harmonic, vec![vec![(0, Rational::one())]]);
    }

    #[test]
    fn rejects_non_differential() {
        let mut s = GradedSpace::new();
        s.push(0, "v", 0);
        let mut d = GradedMap::new(s, 0);
        d.set_block(0, SparseMatrix::from_ints(&[&[1]]));
        assert_eq!(split_differential(&d).unwrap_err(), SplitError::NotADifferential(0));
    }
}
