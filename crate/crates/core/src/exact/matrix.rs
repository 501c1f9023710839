use std::collections::{BTreeMap, BTreeSet};

use super::rational::Rational;

/// Sparse vector: entries sorted by index, no stored zeros.
pub type SVec = Vec<(usize, Rational)>;

/// Dense vector of rationals.
pub type DVec = Vec<Rational>;

pub fn svec_from_dense(v: &[Rational]) -> SVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn svec_to_dense(v: &SVec, len: usize) -> DVec {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// `a + c * b`.
pub fn svec_axpy(a: &SVec, c: &Rational, b: &SVec) -> SVec {
    if c.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn svec_scale(a: &SVec, c: &Rational) -> SVec {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x * c)).collect()
}

fn svec_get(a: &SVec, idx: usize) -> Option<&Rational> {
    a.binary_search_by_key(&idx, |(i, _)| *i).ok().map(|p| &a[p].1)
}

/// Sparse matrix over the rationals, stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::new(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    /// Builds a matrix from its columns given as sparse vectors.
    pub fn from_columns(rows: usize, cols: &[SVec]) -> Self {
        let mut m = Self::new(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col {
                m.add_to(*i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Rational) {
        let cur = self.get(r, c);
        self.set(r, c, &cur + v);
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn row(&self, r: usize) -> SVec {
        self.data[r].iter().map(|(c, v)| (*c, v.clone())).collect()
    }

    pub fn column(&self, c: usize) -> SVec {
        let mut out = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            if let Some(v) = row.get(&c) {
                out.push((r, v.clone()));
            }
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c)).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> DVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        self.data
            .iter()
            .map(|row| row.iter().map(|(c, x)| x * &v[*c]).sum())
            .collect()
    }

    pub fn mul_svec(&self, v: &SVec) -> SVec {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (r, row) in self.data.iter().enumerate() {
            let mut s = Rational::zero();
            for (c, x) in v {
                if let Some(m) = row.get(c) {
                    s += m * x;
                }
            }
            if !s.is_zero() {
                acc.insert(r, s);
            }
        }
        acc.into_iter().collect()
    }

    pub fn mul(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::new(self.rows, o.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, x) in row {
                for (c, y) in &o.data[*k] {
                    let e = acc.entry(*c).or_insert_with(Rational::zero);
                    *e += x * y;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[r] = acc;
        }
        out
    }

    pub fn add(&self, o: &SparseMatrix) -> SparseMatrix {
        assert!(self.rows == o.rows && self.cols == o.cols, "dimension mismatch");
        let mut out = self.clone();
        for (r, c, v) in o.entries() {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        let mut out = Self::new(self.rows, self.cols);
        for (r, c, v) in self.entries() {
            out.set(r, c, v * s);
        }
        out
    }

    /// Reduced row echelon form, pivoting on the lowest available column and
    /// the lowest row index among candidates.
    pub fn rref(&self) -> Rref {
        let mut ech = Echelon::new();
        for r in 0..self.rows {
            ech.insert(self.row(r));
        }
        ech.into_rref(self.cols)
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut a = self.to_dense();
        let n = self.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let piv = a[col][col].clone();
            det *= &piv;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &piv;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        det
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<SparseMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut ech = Echelon::new();
        for r in 0..n {
            let mut row = self.row(r);
            row.push((n + r, Rational::one()));
            ech.insert(row);
        }
        let rref = ech.into_rref(2 * n);
        if rref.pivots.len() < n || rref.pivots.iter().enumerate().any(|(i, p)| *p != i) {
            return None;
        }
        let mut inv = Self::new(n, n);
        for (i, row) in rref.rows.iter().enumerate() {
            for (c, v) in row {
                if *c >= n {
                    inv.set(i, c - n, v.clone());
                }
            }
        }
        Some(inv)
    }
}

/// Result of row reduction: nonzero rows in order of increasing pivot.
#[derive(Clone, Debug)]
pub struct Rref {
    pub cols: usize,
    pub pivots: Vec<usize>,
    pub rows: Vec<SVec>,
}

/// Incrementally built echelon basis; each stored row has leading entry 1
/// at its pivot column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.rows.contains_key(&c)
    }

    /// Reduces `v` against all stored rows, clearing every pivot column.
    pub fn reduce(&self, v: &SVec) -> SVec {
        let mut v = v.clone();
        let mut start = 0usize;
        loop {
            let next = v.iter().skip(start).position(|(i, _)| self.rows.contains_key(i));
            let Some(off) = next else { break };
            let pos = start + off;
            let (idx, coeff) = v[pos].clone();
            let row = &self.rows[&idx];
            v = svec_axpy(&v, &(-coeff), row);
            start = v.iter().position(|(i, _)| *i > idx).unwrap_or(v.len());
        }
        v
    }

    /// Inserts `v`; returns the new pivot column if `v` was independent.
    pub fn insert(&mut self, v: SVec) -> Option<usize> {
        let r = self.reduce(&v);
        let (p, lead) = r.first()?.clone();
        let r = svec_scale(&r, &lead.recip());
        self.rows.insert(p, r);
        Some(p)
    }

    pub fn into_rref(self, cols: usize) -> Rref {
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        let mut done: BTreeMap<usize, SVec> = BTreeMap::new();
        for &p in pivots.iter().rev() {
            let mut row = self.rows[&p].clone();
            for (&q, qrow) in done.iter() {
                if let Some(c) = svec_get(&row, q).cloned() {
                    row = svec_axpy(&row, &(-c), qrow);
                }
            }
            done.insert(p, row);
        }
        Rref { cols, pivots: pivots.clone(), rows: pivots.iter().map(|p| done[p].clone()).collect() }
    }
}

/// Basis of the nullspace of `m`, one vector per free column (in increasing
/// order), each scaled so that its first nonzero entry is 1.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<DVec> {
    kernel_basis_sparse(m).into_iter().map(|v| svec_to_dense(&v, m.cols())).collect()
}

pub fn kernel_basis_sparse(m: &SparseMatrix) -> Vec<SVec> {
    let rref = m.rref();
    kernel_from_rref(&rref)
}

pub fn kernel_from_rref(rref: &Rref) -> Vec<SVec> {
    let pivset: std::collections::BTreeSet<usize> = rref.pivots.iter().copied().collect();
    let mut out = Vec::new();
    for f in (0..rref.cols).filter(|c| !pivset.contains(c)) {
        let mut v: Vec<(usize, Rational)> = Vec::new();
        for (p, row) in rref.pivots.iter().zip(&rref.rows) {
            if let Some(x) = svec_get(row, f) {
                v.push((*p, -x));
            }
        }
        v.push((f, Rational::one()));
        v.sort_by_key(|(i, _)| *i);
        let lead = v[0].1.clone();
        out.push(svec_scale(&v, &lead.recip()));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("inconsistent: right-hand side is not in the image")]
    Inconsistent,
    #[error("dimension mismatch: matrix has {rows} rows, rhs has {rhs}")]
    Dimension { rows: usize, rhs: usize },
}

/// Some exact solution of `m x = rhs`; free variables are set to zero.
pub fn solve(m: &SparseMatrix, rhs: &[Rational]) -> Result<DVec, SolveError> {
    if rhs.len() != m.rows() {
        return Err(SolveError::Dimension { rows: m.rows(), rhs: rhs.len() });
    }
    let x = solve_sparse(m, &svec_from_dense(rhs))?;
    Ok(svec_to_dense(&x, m.cols()))
}

pub fn solve_sparse(m: &SparseMatrix, rhs: &SVec) -> Result<SVec, SolveError> {
    let n = m.cols();
    let mut ech = Echelon::new();
    for r in 0..m.rows() {
        let mut row = m.row(r);
        if let Some(x) = svec_get(rhs, r) {
            row.push((n, x.clone()));
        }
        ech.insert(row);
    }
    let rref = ech.into_rref(n + 1);
    if rref.pivots.contains(&n) {
        return Err(SolveError::Inconsistent);
    }
    let mut x = Vec::new();
    for (p, row) in rref.pivots.iter().zip(&rref.rows) {
        if let Some(v) = svec_get(row, n) {
            x.push((*p, v.clone()));
        }
    }
    Ok(x)
}

/// Some `x` with `sum_j x_j cols[j] = rhs`, by sparse Gaussian elimination
/// pivoting on the sparsest column and, within it, the sparsest row.
pub fn solve_columns(cols: &[SVec], rhs: &SVec) -> Option<SVec> {
    let nrows = cols.iter().flat_map(|c| c.iter().map(|(i, _)| i + 1)).chain(rhs.iter().map(|(i, _)| i + 1)).max().unwrap_or(0);
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); nrows];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cols.len()];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col {
            rows[*i].insert(j, v.clone());
            col_rows[j].insert(*i);
        }
    }
    let mut b: Vec<Rational> = vec![Rational::zero(); nrows];
    for (i, v) in rhs {
        b[*i] = v.clone();
    }
    let mut queue: BTreeSet<(usize, usize)> =
        col_rows.iter().enumerate().filter(|(_, r)| !r.is_empty()).map(|(j, r)| (r.len(), j)).collect();
    let mut done = vec![false; nrows];
    let mut pivots: Vec<(usize, usize, BTreeMap<usize, Rational>)> = Vec::new();
    while let Some((_, c)) = queue.pop_first() {
        let r = *col_rows[c].iter().min_by_key(|&&i| (rows[i].len(), i)).expect("queued columns are nonempty");
        let prow = std::mem::take(&mut rows[r]);
        let pb = b[r].clone();
        done[r] = true;
        for (&k, _) in &prow {
            if k != c {
                queue.remove(&(col_rows[k].len(), k));
                col_rows[k].remove(&r);
                if !col_rows[k].is_empty() {
                    queue.insert((col_rows[k].len(), k));
                }
            }
        }
        col_rows[c].remove(&r);
        let lead = prow[&c].clone();
        let others: Vec<usize> = std::mem::take(&mut col_rows[c]).into_iter().collect();
        for i in others {
            let factor = &rows[i][&c] / &lead;
            for (&k, v) in &prow {
                let cur = rows[i].get(&k).cloned().unwrap_or_else(Rational::zero);
                let new = &cur - &(&factor * v);
                if k == c {
                    rows[i].remove(&c);
                    continue;
                }
                let was = !cur.is_zero();
                let now = !new.is_zero();
                if was != now {
                    queue.remove(&(col_rows[k].len(), k));
                    if now {
                        col_rows[k].insert(i);
                    } else {
                        col_rows[k].remove(&i);
                    }
                    if !col_rows[k].is_empty() {
                        queue.insert((col_rows[k].len(), k));
                    }
                }
                if now {
                    rows[i].insert(k, new);
                } else {
                    rows[i].remove(&k);
                }
            }
            let nb = &b[i] - &(&factor * &pb);
            b[i] = nb;
        }
        pivots.push((r, c, prow));
    }
    if (0..nrows).any(|i| !done[i] && !b[i].is_zero()) {
        return None;
    }
    let mut x: BTreeMap<usize, Rational> = BTreeMap::new();
    for (r, c, prow) in pivots.iter().rev() {
        let mut acc = b[*r].clone();
        for (k, v) in prow {
            if k != c {
                if let Some(xk) = x.get(k) {
                    acc = &acc - &(v * xk);
                }
            }
        }
        let val = &acc / &prow[c];
        if !val.is_zero() {
            x.insert(*c, val);
        }
    }
    Some(x.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::q;

    #[test]
    fn column_solver_matches_row_solver() {
        let m = SparseMatrix::from_ints(&[&[1, 2, 0], &[0, 1, 1], &[1, 3, 1], &[2, 0, -2]]);
        let x = svec_from_dense(&ints(&[1, -1, 2]));
        let rhs = m.mul_svec(&x);
        let cols: Vec<SVec> = (0..3).map(|c| m.column(c)).collect();
        let got = solve_columns(&cols, &rhs).unwrap();
        assert_eq!(m.mul_svec(&got), rhs);
        assert!(solve_columns(&cols, &vec![(0, q(1, 1))]).is_none());
    }

    fn ints(v: &[i64]) -> DVec {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn kernel_examples() {
        let m = SparseMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert_eq!(kernel_basis(&m), vec![ints(&[1, -1])]);
        assert!(kernel_basis(&SparseMatrix::identity(2)).is_empty());
        let z = SparseMatrix::new(2, 3);
        assert_eq!(kernel_basis(&z), vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]);
    }

    #[test]
    fn solve_examples() {
        let m = SparseMatrix::from_ints(&[&[2]]);
        assert_eq!(solve(&m, &ints(&[1])).unwrap(), vec![q(1, 2)]);
        let z = SparseMatrix::from_ints(&[&[0]]);
        assert_eq!(solve(&z, &ints(&[1])), Err(SolveError::Inconsistent));
        let w = SparseMatrix::from_ints(&[&[1, 1]]);
        assert_eq!(solve(&w, &ints(&[3])).unwrap(), ints(&[3, 0]));
    }

    #[test]
    fn inverse_and_det() {
        let m = SparseMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), SparseMatrix::identity(2));
        assert_eq!(m.determinant(), Rational::one());
        assert!(SparseMatrix::from_ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
