//! Reversal into the opposite algebra and the shuffle products.

use super::chain::{Bar, BarLin, Chain, Mono};
use crate::dga::SuperAlgebra;
use crate::exact::{Lin, Rational};

/// `Phi: C_*(A) -> C_*(A^op)`, reversing the slots.
pub fn phi<A: SuperAlgebra>(a: &A, t: &[A::Basis]) -> (Bar<A::Basis>, Rational) {
    let l = t.len() - 1;
    let shifted: Vec<usize> = t[1..].iter().map(|b| a.parity(b) as usize + 1).collect();
    let mut e = l;
    for i in 0..shifted.len() {
        for j in i + 1..shifted.len() {
            e += shifted[i] * shifted[j];
        }
    }
    let mut out = Vec::with_capacity(t.len());
    out.push(t[0].clone());
    out.extend(t[1..].iter().rev().cloned());
    (out, Rational::sign(e))
}

pub fn phi_chain<A: SuperAlgebra>(a: &A, x: &Chain<A::Basis>) -> Chain<A::Basis> {
    x.apply(|t| {
        let (s, e) = phi(a, t);
        Lin::single(s, e)
    })
}

/// Signed sum over the order-preserving shuffles of `xs` and `ys`. Letters
/// carry their parity; swapping adjacent `x`, `y` costs `(|x|+1)(|y|+1)`.
pub fn shuffle_words<T: Clone + Ord>(xs: &[(T, usize)], ys: &[(T, usize)]) -> Lin<Vec<T>> {
    let mut out = Lin::new();
    let mut cur = Vec::with_capacity(xs.len() + ys.len());
    shuffle_rec(xs, ys, 0, &mut cur, &mut out);
    out
}

fn shuffle_rec<T: Clone + Ord>(
    xs: &[(T, usize)],
    ys: &[(T, usize)],
    e: usize,
    cur: &mut Vec<T>,
    out: &mut Lin<Vec<T>>,
) {
    if xs.is_empty() || ys.is_empty() {
        let mut w = cur.clone();
        w.extend(xs.iter().chain(ys).map(|(t, _)| t.clone()));
        out.add(w, Rational::sign(e));
        return;
    }
    cur.push(xs[0].0.clone());
    shuffle_rec(&xs[1..], ys, e, cur, out);
    cur.pop();
    // ys[0] jumps over every remaining x
    let jump: usize = xs.iter().map(|(_, p)| (p + 1) * (ys[0].1 + 1)).sum();
    cur.push(ys[0].0.clone());
    shuffle_rec(xs, &ys[1..], e + jump, cur, out);
    cur.pop();
}

/// Sign of rotating the first `k` letters of a word to its end.
fn rotation_sign(par: &[usize], k: usize) -> usize {
    let head: usize = par[..k].iter().map(|p| p + 1).sum();
    let tail: usize = par[k..].iter().map(|p| p + 1).sum();
    head * tail
}

type Pair<X, Y> = (<X as SuperAlgebra>::Basis, <Y as SuperAlgebra>::Basis);

/// `sh: C_*(A) (x) C_*(A') -> C_*(A (x) A')`.
pub fn sh<A: SuperAlgebra, A2: SuperAlgebra>(
    a: &A,
    a2: &A2,
    t: &[A::Basis],
    t2: &[A2::Basis],
) -> BarLin<Pair<A, A2>> {
    let l = t.len() - 1;
    let rest: usize = t[1..].iter().map(|b| a.parity(b) as usize).sum();
    let pre = Rational::sign(a2.parity(&t2[0]) as usize * (l + rest));
    let xs: Vec<_> = t[1..].iter().map(|b| ((b.clone(), a2.unit()), a.parity(b) as usize)).collect();
    let ys: Vec<_> = t2[1..].iter().map(|b| ((a.unit(), b.clone()), a2.parity(b) as usize)).collect();
    let head = (t[0].clone(), t2[0].clone());
    let mut out = Lin::new();
    for (w, c) in &shuffle_words(&xs, &ys) {
        let mut bar = Vec::with_capacity(w.len() + 1);
        bar.push(head.clone());
        bar.extend(w.iter().cloned());
        out.add(bar, c * &pre);
    }
    out
}

/// `Sh: C_*(A) (x) C_*(A') -> C_*(A (x) A')`, cyclic shuffles with `a0`
/// to the left of `a'0`.
pub fn cyclic_sh<A: SuperAlgebra, A2: SuperAlgebra>(
    a: &A,
    a2: &A2,
    t: &[A::Basis],
    t2: &[A2::Basis],
) -> BarLin<Pair<A, A2>> {
    let l = t.len() - 1;
    let m = t2.len() - 1;
    let pa: Vec<usize> = t.iter().map(|b| a.parity(b) as usize).collect();
    let pb: Vec<usize> = t2.iter().map(|b| a2.parity(b) as usize).collect();
    let pre = l + pa.iter().sum::<usize>();
    let mut out = Lin::new();
    for r in 0..=l {
        let xs: Vec<_> = (0..=l).map(|k| (r + k) % (l + 1)).map(|i| ((0u8, i), pa[i])).collect();
        for s in 0..=m {
            let ys: Vec<_> = (0..=m).map(|k| (s + k) % (m + 1)).map(|j| ((1u8, j), pb[j])).collect();
            let rot = rotation_sign(&pa, r) + rotation_sign(&pb, s);
            for (w, c) in &shuffle_words(&xs, &ys) {
                let p0 = w.iter().position(|x| *x == (0, 0)).unwrap();
                let q0 = w.iter().position(|x| *x == (1, 0)).unwrap();
                if p0 > q0 {
                    continue;
                }
                let mut bar = Vec::with_capacity(w.len() + 1);
                bar.push((a.unit(), a2.unit()));
                for &(side, i) in w {
                    bar.push(if side == 0 { (t[i].clone(), a2.unit()) } else { (a.unit(), t2[i].clone()) });
                }
                out.add(bar, c * &Rational::sign(pre + rot));
            }
        }
    }
    out
}

/// Element of `C_*(A) (x) C_*(A')` with coefficients in `Q[z]((u))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairChain<B1: Ord, B2: Ord>(pub Lin<(Mono, Bar<B1>, Bar<B2>)>);

impl<B1: Ord + Clone, B2: Ord + Clone> PairChain<B1, B2> {
    pub fn zero() -> Self {
        PairChain(Lin::new())
    }

    /// `x (x) y`, multiplying coefficients.
    pub fn product(x: &Chain<B1>, y: &Chain<B2>) -> Self {
        let mut out = Lin::new();
        for (m, t, c) in x.iter() {
            for (n, s, d) in y.iter() {
                out.add((m.times(n), t.clone(), s.clone()), c * d);
            }
        }
        PairChain(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn plus(&self, o: &Self) -> Self {
        PairChain(self.0.plus(&o.0))
    }

    pub fn minus(&self, o: &Self) -> Self {
        PairChain(self.0.minus(&o.0))
    }

    /// Applies a map on pairs of tensors; the closure carries any Koszul sign.
    pub fn map_pairs(&self, f: impl Fn(&Bar<B1>, &Bar<B2>) -> Lin<(Bar<B1>, Bar<B2>)>) -> Self {
        let mut out = Lin::new();
        for ((m, t, s), c) in &self.0 {
            for ((t2, s2), d) in &f(t, s) {
                out.add((m.clone(), t2.clone(), s2.clone()), c * d);
            }
        }
        PairChain(out)
    }

    /// `X (x) 1`, as a chain map.
    pub fn left(&self, f: impl Fn(&Chain<B1>) -> Chain<B1>) -> Self {
        let mut out = Lin::new();
        for ((m, t, s), c) in &self.0 {
            let img = f(&Chain::term(m.clone(), t.clone(), c.clone()));
            for (n, t2, d) in img.iter() {
                out.add((n.clone(), t2.clone(), s.clone()), d.clone());
            }
        }
        PairChain(out)
    }

    /// `1 (x) X` for `X` of parity `x_par`, with sign `(-1)^{|X||alpha|}`.
    pub fn right(
        &self,
        x_par: usize,
        left_parity: impl Fn(&Bar<B1>) -> usize,
        f: impl Fn(&Chain<B2>) -> Chain<B2>,
    ) -> Self {
        let mut out = Lin::new();
        for ((m, t, s), c) in &self.0 {
            let sgn = Rational::sign(x_par * left_parity(t));
            let img = f(&Chain::term(m.clone(), s.clone(), c * &sgn));
            for (n, s2, d) in img.iter() {
                out.add((n.clone(), t.clone(), s2.clone()), d.clone());
            }
        }
        PairChain(out)
    }

    /// Pushes forward along a bilinear map on tensors.
    pub fn to_chain<C: Ord + Clone>(&self, f: impl Fn(&Bar<B1>, &Bar<B2>) -> BarLin<C>) -> Chain<C> {
        let mut out = Chain::zero();
        for ((m, t, s), c) in &self.0 {
            for (w, d) in &f(t, s) {
                out.add_term(m.clone(), w.clone(), c * d);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::FiniteDga;
    use crate::exact::q;

    #[test]
    fn phi_small_cases() {
        let a = FiniteDga::exterior(2);
        // a1 even (e1e2 = 3): Phi(a0[a1]) = -a0[a1]
        assert_eq!(phi(&a, &[1, 3]), (vec![1, 3], q(-1, 1)));
        // two odd slots: sign (-1)^{2 + 0} = +1
        assert_eq!(phi(&a, &[0, 1, 2]), (vec![0, 2, 1], q(1, 1)));
        // two even slots: sign (-1)^{2 + 1} = -1
        assert_eq!(phi(&a, &[0, 3, 3]), (vec![0, 3, 3], q(-1, 1)));
    }

    #[test]
    fn shuffle_of_two_odd_letters_is_symmetric() {
        let w = shuffle_words(&[('x', 1)], &[('y', 1)]);
        assert_eq!(w, Lin::from_terms([(vec!['x', 'y'], q(1, 1)), (vec!['y', 'x'], q(1, 1))]));
        let w = shuffle_words(&[('x', 0)], &[('y', 0)]);
        assert_eq!(w, Lin::from_terms([(vec!['x', 'y'], q(1, 1)), (vec!['y', 'x'], q(-1, 1))]));
    }

    #[test]
    fn shuffle_count_is_binomial() {
        let xs: Vec<_> = (0..3).map(|i| (i, 1)).collect();
        let ys: Vec<_> = (3..5).map(|i| (i, 1)).collect();
        assert_eq!(shuffle_words(&xs, &ys).len(), 10);
    }

    #[test]
    fn sh_of_length_zero_is_product_of_heads() {
        let a = FiniteDga::exterior(1);
        let got = sh(&a, &a, &[1], &[1]);
        assert_eq!(got, Lin::basis(vec![(1, 1)]));
        let got = cyclic_sh(&a, &a, &[1], &[1]);
        // (-1)^{0 + 1} (1 (x) 1)[e (x) 1 | 1 (x) e]
        assert_eq!(got, Lin::single(vec![(0, 0), (1, 0), (0, 1)], q(-1, 1)));
    }
}
