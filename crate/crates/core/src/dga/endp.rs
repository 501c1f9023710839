use crate::exact::{Lin, Rational, SparseMatrix, SVec};

/// Operators on the exterior algebra `P_n` on `theta_1..theta_n`.
///
/// Basis index `I | (J << n)` stands for the normally ordered monomial
/// `theta_I dtheta_J` (increasing indices within each block).
#[derive(Clone, Debug)]
pub struct EndP {
    n: usize,
    table: Vec<Vec<SVec>>,
    supertrace: Vec<Rational>,
    matrices: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("End P_n is only supported for 1 <= n <= 4, got {0}")]
pub struct EndPRange(pub usize);

fn sign_before(k: u32, i: usize) -> i64 {
    if (k & ((1u32 << i) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Matrix of a single generator on the `2^n` basis `theta_K`.
fn generator(n: usize, i: usize, derivation: bool) -> Vec<Vec<i64>> {
    let d = 1usize << n;
    let mut m = vec![vec![0i64; d]; d];
    for k in 0..d as u32 {
        let has = k & (1 << i) != 0;
        if derivation && has {
            m[(k ^ (1 << i)) as usize][k as usize] = sign_before(k, i);
        } else if !derivation && !has {
            m[(k | (1 << i)) as usize][k as usize] = sign_before(k, i);
        }
    }
    m
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = a.len();
    let mut c = vec![vec![0i64; d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..d {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

impl EndP {
    pub fn new(n: usize) -> Result<Self, EndPRange> {
        if !(1..=4).contains(&n) {
            return Err(EndPRange(n));
        }
        let d = 1usize << n;
        let dim = d * d;
        let theta: Vec<_> = (0..n).map(|i| generator(n, i, false)).collect();
        let dtheta: Vec<_> = (0..n).map(|i| generator(n, i, true)).collect();
        let ident: Vec<Vec<i64>> =
            (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        let mut matrices = Vec::with_capacity(dim);
        for idx in 0..dim {
            let (i_mask, j_mask) = (idx & (d - 1), idx >> n);
            let mut m = ident.clone();
            for (i, t) in theta.iter().enumerate() {
                if i_mask & (1 << i) != 0 {
                    m = matmul(&m, t);
                }
            }
            for (j, t) in dtheta.iter().enumerate() {
                if j_mask & (1 << j) != 0 {
                    m = matmul(&m, t);
                }
            }
            matrices.push(m);
        }
        let cols: Vec<SVec> = matrices
            .iter()
            .map(|m| {
                let mut v = SVec::new();
                for r in 0..d {
                    for c in 0..d {
                        if m[r][c] != 0 {
                            v.push((r * d + c, Rational::from(m[r][c])));
                        }
                    }
                }
                v
            })
            .collect();
        let decompose = SparseMatrix::from_columns(dim, &cols)
            .inverse()
            .expect("normally ordered monomials form a basis");
        let mut table = vec![Vec::with_capacity(dim); dim];
        for a in 0..dim {
            for b in 0..dim {
                let p = matmul(&matrices[a], &matrices[b]);
                let mut v = SVec::new();
                for r in 0..d {
                    for c in 0..d {
                        if p[r][c] != 0 {
                            v.push((r * d + c, Rational::from(p[r][c])));
                        }
                    }
                }
                table[a].push(decompose.mul_svec(&v));
            }
        }
        let supertrace = matrices
            .iter()
            .map(|m| {
                let s: i64 = (0..d)
                    .map(|k| if (k as u32).count_ones() % 2 == 0 { m[k][k] } else { -m[k][k] })
                    .sum();
                Rational::from(s)
            })
            .collect();
        Ok(EndP { n, table, supertrace, matrices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn theta(&self, i: usize) -> usize {
        1 << i
    }

    pub fn dtheta(&self, i: usize) -> usize {
        1 << (i + self.n)
    }

    pub fn masks(&self, idx: usize) -> (u32, u32) {
        let d = 1usize << self.n;
        ((idx & (d - 1)) as u32, (idx >> self.n) as u32)
    }

    pub fn parity(&self, idx: usize) -> u8 {
        (idx.count_ones() % 2) as u8
    }

    /// Weight with `wt(theta_i) = theta_w[i]` and `wt(dtheta_i) = -theta_w[i]`.
    pub fn weight(&self, idx: usize, theta_w: &[i64]) -> i64 {
        let (i, j) = self.masks(idx);
        (0..self.n)
            .map(|k| {
                let mut w = 0;
                if i & (1 << k) != 0 {
                    w += theta_w[k];
                }
                if j & (1 << k) != 0 {
                    w -= theta_w[k];
                }
                w
            })
            .sum()
    }

    pub fn mul(&self, a: usize, b: usize) -> &SVec {
        &self.table[a][b]
    }

    pub fn mul_lin(&self, a: usize, b: usize) -> Lin<usize> {
        self.table[a][b].iter().cloned().collect()
    }

    /// Supertrace over `P_n`, where `theta_K` has parity `|K|`.
    pub fn supertrace(&self, idx: usize) -> &Rational {
        &self.supertrace[idx]
    }

    pub fn matrix(&self, idx: usize) -> &[Vec<i64>] {
        &self.matrices[idx]
    }

    pub fn label(&self, idx: usize) -> String {
        let (i, j) = self.masks(idx);
        if idx == 0 {
            return "1".into();
        }
        let mut parts = Vec::new();
        for k in 0..self.n {
            if i & (1 << k) != 0 {
                parts.push(if self.n == 1 { "t".to_string() } else { format!("t{}", k + 1) });
            }
        }
        for k in 0..self.n {
            if j & (1 << k) != 0 {
                parts.push(if self.n == 1 { "dt".to_string() } else { format!("dt{}", k + 1) });
            }
        }
        parts.join("")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn clifford_relations() {
        for n in 1..=3 {
            let e = EndP::new(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let (ti, tj, di, dj) = (e.theta(i), e.theta(j), e.dtheta(i), e.dtheta(j));
                    let anti = |a: usize, b: usize| e.mul_lin(a, b).plus(&e.mul_lin(b, a));
                    assert!(anti(ti, tj).is_zero());
                    assert!(anti(di, dj).is_zero());
                    let expect = if i == j { Lin::basis(0) } else { Lin::new() };
                    assert_eq!(anti(ti, dj), expect);
                }
            }
        }
    }

    #[test]
    fn one_variable_basis_and_trace() {
        let e = EndP::new(1).unwrap();
        assert_eq!(e.dim(), 4);
        // theta dtheta projects onto theta (odd), so its supertrace is -1.
        assert_eq!(e.supertrace(3), &q(-1, 1));
        assert_eq!(e.supertrace(0), &q(0, 1));
        assert!(e.supertrace(e.theta(0)).is_zero());
        assert!(EndP::new(0).is_err());
    }
}
