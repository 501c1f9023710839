//! The trace `Upsilon`, the canonical pairing and the Chern character.

use super::endo::{left_right, Atom, RhoImage, Word, WordAlgebra};
use super::retract::{GradedAlgebra, Retract, RetractError};
use crate::bar::{cyclic_sh, phi_chain, sh, Bar, BarOps, Chain, Coef, Mono, Op, PairChain};
use crate::dga::{Elem, FiniteDga, Opposite, SuperAlgebra};
use crate::exact::{Lin, Rational};

/// `str_HA(F(N(t)))` for a tensor of homogeneous operators described by
/// `par`, `weight` and `act`.
///
/// Every rotation has the same weight and parity, and the supertrace only
/// reads diagonal blocks, so tensors whose `F`-words have nonzero weight or odd
/// parity are skipped without evaluation.
fn upsilon_generic<A: GradedAlgebra, T: Clone>(
    r: &Retract<'_, A>,
    t: &[T],
    par: impl Fn(&T) -> usize,
    weight: impl Fn(&T) -> i64,
    act: impl Fn(&T, &Elem<A::Basis>) -> Elem<A::Basis>,
) -> Rational {
    let l = t.len() - 1;
    let total: i64 = t.iter().map(&weight).sum();
    let parity: usize = t.iter().map(&par).sum::<usize>() + l;
    if total != l as i64 * r.algebra().d_shift() || parity % 2 == 1 {
        return Rational::zero();
    }
    let mut cur = t.to_vec();
    let mut e = 0usize;
    let mut acc = Rational::zero();
    for _ in 0..=l {
        let v = r.supertrace(|x| {
            let mut v = act(&cur[l], x);
            for j in (0..l).rev() {
                if v.is_zero() {
                    break;
                }
                v = act(&cur[j], &r.homotopy(&v));
            }
            v
        });
        if !v.is_zero() {
            acc += &(&v * &Rational::sign(e));
        }
        let rest: usize = cur[1..].iter().map(&par).sum();
        e += (par(&cur[0]) + 1) * (l + rest);
        cur.rotate_left(1);
    }
    acc
}

/// `Upsilon` on a tensor of words.
pub fn upsilon_word_tensor<A: GradedAlgebra>(w: &WordAlgebra<'_, '_, A>, t: &[Word<A::Basis>]) -> Rational {
    upsilon_generic(w.r, t, |x| w.word_parity(x), |x| w.weight(x), |x, v| w.apply_word(x, v))
}

/// `Upsilon` on a chain of words.
pub fn upsilon_words<A: GradedAlgebra>(w: &WordAlgebra<'_, '_, A>, x: &Chain<Word<A::Basis>>) -> Coef {
    let mut out = Coef::zero();
    for (m, t, c) in x.iter() {
        out.add_term(m.clone(), c * &upsilon_word_tensor(w, t));
    }
    out
}

/// `Upsilon . C(rho)` on a tensor over `A (x) A^op`.
pub fn upsilon_rho_tensor<A: GradedAlgebra>(r: &Retract<'_, A>, t: &[(A::Basis, A::Basis)]) -> Rational {
    let a = r.algebra();
    upsilon_generic(
        r,
        t,
        |(x, y)| (a.parity(x) + a.parity(y)) as usize % 2,
        |(x, y)| a.weight(x) + a.weight(y),
        |(x, y), v| left_right(a, x, y, v),
    )
}

pub fn upsilon_rho<A: GradedAlgebra>(r: &Retract<'_, A>, x: &Chain<(A::Basis, A::Basis)>) -> Coef {
    let mut out = Coef::zero();
    for (m, t, c) in x.iter() {
        let v = upsilon_rho_tensor(r, t);
        if !v.is_zero() {
            out.add_term(m.clone(), c * &v);
        }
    }
    out
}

/// `sh` on an element of `C_*(A) (x) C_*(A^op)`.
pub fn sh_pairs<A: SuperAlgebra>(a: &A, p: &PairChain<A::Basis, A::Basis>) -> Chain<(A::Basis, A::Basis)> {
    let opp = Opposite(a);
    p.to_chain(|t, s| sh(a, &opp, t, s))
}

/// `sh + u Sh` on an element of `C_*(A) (x) C_*(A^op)`.
pub fn sh_plus_u_cyclic<A: SuperAlgebra>(a: &A, p: &PairChain<A::Basis, A::Basis>) -> Chain<(A::Basis, A::Basis)> {
    let opp = Opposite(a);
    let cyc = p.to_chain(|t, s| cyclic_sh(a, &opp, t, s));
    sh_pairs(a, p).plus(&cyc.times_u(1))
}

/// `Upsilon C(rho) (sh + u Sh)` on a pair chain, or `Upsilon C(rho) sh` when
/// `cyclic` is false. Pairs whose shuffles cannot have a nonzero trace are
/// skipped before shuffling.
pub fn upsilon_rho_shuffled<A: GradedAlgebra>(
    r: &Retract<'_, A>,
    p: &PairChain<A::Basis, A::Basis>,
    cyclic: bool,
) -> Coef {
    let a = r.algebra();
    let opp = Opposite(a);
    let s = a.d_shift();
    let mut out = Coef::zero();
    for ((m, t, t2), c) in &p.0 {
        let weight: i64 = t.iter().chain(t2).map(|b| a.weight(b)).sum();
        let parity: usize = t.iter().chain(t2).map(|b| a.parity(b) as usize).sum();
        let len = (t.len() + t2.len() - 2) as i64;
        if weight == len * s && (parity as i64 + len) % 2 == 0 {
            for (w, d) in &sh(a, &opp, t, t2) {
                let v = upsilon_rho_tensor(r, w);
                out.add_term(m.clone(), &(c * d) * &v);
            }
        }
        if cyclic && weight == (len + 2) * s && (parity as i64 + len) % 2 == 0 {
            let mu = m.times(&Mono::u(1));
            for (w, d) in &cyclic_sh(a, &opp, t, t2) {
                let v = upsilon_rho_tensor(r, w);
                out.add_term(mu.clone(), &(c * d) * &v);
            }
        }
    }
    out
}

/// `Upsilon . C(rho) . sh`.
pub fn upsilon_rho_sh<A: GradedAlgebra>(r: &Retract<'_, A>, p: &PairChain<A::Basis, A::Basis>) -> Coef {
    upsilon_rho_shuffled(r, p, false)
}

/// `<alpha, beta> = Upsilon C(rho) sh (alpha (x) Phi(beta*))`, Laurent in `u`
/// and polynomial in the `z` variables.
pub fn canonical_pairing<A: GradedAlgebra>(
    r: &Retract<'_, A>,
    alpha: &Chain<A::Basis>,
    beta: &Chain<A::Basis>,
) -> Result<Coef, RetractError> {
    let a = r.algebra();
    let p = PairChain::product(alpha, &phi_chain(a, &beta.star()));
    let v = upsilon_rho_sh(r, &p);
    r.check_escape()?;
    Ok(v)
}

/// The pairing of chains with `z` coefficients, truncated to total `z`-degree
/// `z_order`.
pub fn pairing_z_extension<A: GradedAlgebra>(
    r: &Retract<'_, A>,
    alpha: &Chain<A::Basis>,
    beta: &Chain<A::Basis>,
    z_order: u32,
) -> Result<Coef, RetractError> {
    let v = canonical_pairing(r, alpha, beta)?;
    let mut out = Coef::zero();
    for (m, c) in v.terms() {
        if m.z_degree() <= z_order {
            out.add_term(m.clone(), c.clone());
        }
    }
    Ok(out)
}

/// The `u^0 z^0` part of the pairing.
pub fn eta_hh<A: GradedAlgebra>(
    r: &Retract<'_, A>,
    alpha: &Chain<A::Basis>,
    beta: &Chain<A::Basis>,
) -> Result<Rational, RetractError> {
    Ok(canonical_pairing(r, alpha, beta)?.constant_term())
}

/// Chern character of `pi = i pi_k p`, truncated at `u^m`.
pub fn chern_character<B: Ord + Clone>(k: usize, m: usize) -> Chain<Word<B>> {
    let pi: Word<B> = vec![Atom::P(k)];
    let mut out = Chain::tensor(vec![pi.clone()]);
    let mut coef = Rational::one();
    for l in 1..=m {
        // (2l)!/l! from (2l-2)!/(l-1)!
        coef = &coef * &Rational::from((2 * l * (2 * l - 1) / l) as i64);
        let c = &coef * &Rational::sign(l);
        let mut head = vec![pi.clone()];
        head.extend(std::iter::repeat_n(pi.clone(), 2 * l));
        let mut tail = vec![vec![]];
        tail.extend(std::iter::repeat_n(pi.clone(), 2 * l));
        out.add_term(Mono::u(l as i32), head, c.clone());
        out.add_term(Mono::u(l as i32), tail, &c * &Rational::new(-1, 2));
    }
    out
}

/// Default projector index: the first class in (weight, parity, index) order.
pub fn default_projector<A: GradedAlgebra>(r: &Retract<'_, A>) -> usize {
    (0..r.ha_dim()).min_by_key(|&k| (r.ha_weight(k), r.ha_parity(k), k)).expect("nonzero cohomology")
}

/// `(b + uB) ch` truncated at `u^m`; zero when the cocycle condition holds.
pub fn chern_defect<A: GradedAlgebra>(w: &WordAlgebra<'_, '_, A>, k: usize, m: usize) -> Chain<Word<A::Basis>> {
    let ops = BarOps::new(w);
    ops.b_plus_ub(&chern_character(k, m)).filter_mono(|mo| mo.u <= m as i32)
}

/// Outcome of comparing two sides of an identity: `Ok(true)` when they agree
/// and are nonzero, `Ok(false)` when both vanish.
pub type Probe = Result<bool, String>;

fn compare_coef(lhs: Coef, rhs: Coef) -> Probe {
    if lhs == rhs {
        Ok(!lhs.is_zero())
    } else {
        Err(format!("{lhs} != {rhs}"))
    }
}

/// `(X (x) 1, 1 (x) X')` on `alpha (x) beta` for operators of parity `par`.
fn left_and_right<A: SuperAlgebra>(
    a: &A,
    p: &PairChain<A::Basis, A::Basis>,
    par: usize,
    left: impl Fn(&BarOps<'_, A>, &[A::Basis]) -> Lin<Bar<A::Basis>>,
    right: impl Fn(&BarOps<'_, Opposite<'_, A>>, &[A::Basis]) -> Lin<Bar<A::Basis>>,
) -> [PairChain<A::Basis, A::Basis>; 2] {
    let ops = BarOps::new(a);
    let opp = Opposite(a);
    let ops_op = BarOps::new(&opp);
    let l = p.left(|x| x.apply(|t| ops.normalize(left(&ops, t))));
    let r = p.right(par, |t| ops.tensor_parity(t), |x| x.apply(|t| ops_op.normalize(right(&ops_op, t))));
    [l, r]
}

fn b_c_sides<A: SuperAlgebra>(
    a: &A,
    c: &Elem<A::Basis>,
    alpha: &Chain<A::Basis>,
    beta: &Chain<A::Basis>,
) -> [PairChain<A::Basis, A::Basis>; 2] {
    left_and_right(a, &PairChain::product(alpha, beta), 1, |o, t| o.b_c(c, t), |o, t| o.b_c(c, t))
}

/// The three statements `Upsilon C(rho) sh (X (x) 1) = Upsilon C(rho) sh (1 (x) X')`
/// for `X = b(c), e(c), E(c)` and a central closed even `c`.
pub fn central_trace_checks<A: GradedAlgebra>(
    r: &Retract<'_, A>,
    c: &Elem<A::Basis>,
    alpha: &Chain<A::Basis>,
    beta: &Chain<A::Basis>,
) -> [Probe; 3] {
    let a = r.algebra();
    let p = PairChain::product(alpha, beta);
    let bc = b_c_sides(a, c, alpha, beta);
    let ec = left_and_right(a, &p, 0, |o, t| o.e_c(c, t), |o, t| o.e_c(c, t));
    let big = left_and_right(a, &p, 0, |o, t| o.big_e_c(c, t), |o, t| o.tensor_op(&Op::TildeBigEc(c), t));
    [bc, ec, big].map(|[l, rr]| compare_coef(upsilon_rho_sh(r, &l), upsilon_rho_sh(r, &rr)))
}

/// `C(rho)` into the normalized chains of the matrix image.
pub fn rho_chain(img: &RhoImage, x: &Chain<(usize, usize)>) -> Chain<usize> {
    let ops = BarOps::new(img);
    x.apply_to(|t| {
        let mut acc: Lin<Bar<usize>> = Lin::basis(vec![]);
        for (p, q) in t {
            let slot = img.rho(*p, *q);
            let mut next = Lin::new();
            for (w, c) in &acc {
                for (s, d) in slot {
                    let mut w2 = w.clone();
                    w2.push(*s);
                    next.add(w2, c * d);
                }
            }
            acc = next;
        }
        ops.normalize(acc)
    })
}

/// `C(rho)(sh + uSh)(b(c) (x) 1) = C(rho)(sh + uSh)(1 (x) b(c))` in
/// `C_*(End A)`, checked exactly inside the faithful matrix image.
pub fn rho_shuffle_check(
    a: &FiniteDga,
    img: &RhoImage,
    c: &Elem<usize>,
    alpha: &Chain<usize>,
    beta: &Chain<usize>,
) -> Probe {
    let [l, r] = b_c_sides(a, c, alpha, beta).map(|x| rho_chain(img, &sh_plus_u_cyclic(a, &x)));
    if l == r {
        Ok(!l.is_zero())
    } else {
        Err(format!("{} terms differ", l.minus(&r).len()))
    }
}

/// `Upsilon C(rho)(sh + uSh)((e(delta) + uE(delta)) (x) 1)(1 (x) B)` agrees on
/// `b(c) (x) 1` and `1 (x) b(c)`.
pub fn homotopy_term_check<A: GradedAlgebra>(
    r: &Retract<'_, A>,
    c: &Elem<A::Basis>,
    alpha: &Chain<A::Basis>,
    beta: &Chain<A::Basis>,
) -> Probe {
    let a = r.algebra();
    let ops = BarOps::new(a);
    let opp = Opposite(a);
    let ops_op = BarOps::new(&opp);
    let [l, rr] = b_c_sides(a, c, alpha, beta).map(|x| {
        let x = x.right(1, |t| ops.tensor_parity(t), |y| y.apply(|t| ops_op.normalize(ops_op.connes(t))));
        let x = x.left(|y| {
            let e = y.apply(|t| ops.normalize(ops.e_delta(t)));
            let big = y.apply(|t| ops.normalize(ops.big_e_delta(t)));
            e.plus(&big.times_u(1))
        });
        upsilon_rho_shuffled(r, &x, true)
    });
    compare_coef(l, rr)
}

/// `Upsilon(b x) = -Upsilon(uB x)`.
pub fn upsilon_closed_check<A: GradedAlgebra>(w: &WordAlgebra<'_, '_, A>, x: &Chain<Word<A::Basis>>) -> Probe {
    let ops = BarOps::new(w);
    let bx = upsilon_words(w, &ops.apply(Op::B, x));
    let ubx = upsilon_words(w, &ops.apply(Op::Connes, x).times_u(1));
    compare_coef(bx, ubx.scaled(&-Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn ground() -> FiniteDga {
        FiniteDga::exterior(0)
    }

    #[test]
    fn pairing_of_units_over_the_ground_field() {
        let a = ground();
        let r = Retract::new(&a).unwrap();
        let one = Chain::tensor(vec![0usize]);
        assert_eq!(canonical_pairing(&r, &one, &one).unwrap(), Coef::constant(q(1, 1)));
        assert_eq!(eta_hh(&r, &one, &one).unwrap(), q(1, 1));
    }

    #[test]
    fn trace_of_identity_is_superdimension() {
        let a = FiniteDga::exterior(2);
        let r = Retract::new(&a).unwrap();
        let w = WordAlgebra::new(&r);
        // two even and two odd classes
        assert_eq!(upsilon_word_tensor(&w, &[vec![]]), q(0, 1));
        assert_eq!(upsilon_word_tensor(&w, &[vec![Atom::P(0)]]), q(1, 1));
        // h = 0 kills every tensor of length >= 1
        assert_eq!(upsilon_word_tensor(&w, &[vec![Atom::P(0)], vec![Atom::P(0)]]), q(0, 1));
    }

    #[test]
    fn chern_character_is_a_cocycle_with_unit_trace() {
        let a = FiniteDga::dual_numbers_koszul();
        let r = Retract::new(&a).unwrap();
        let w = WordAlgebra::new(&r);
        for k in 0..r.ha_dim() {
            for m in 0..=3 {
                assert!(chern_defect(&w, k, m).is_zero(), "k={k} m={m}");
            }
            let v = upsilon_words(&w, &chern_character(k, 2));
            assert!(v == Coef::constant(q(1, 1)) || v == Coef::constant(q(-1, 1)), "{v}");
        }
    }

    #[test]
    fn chern_character_first_order_term() {
        let ch = chern_character::<usize>(0, 1);
        let pi = vec![Atom::P(0)];
        let u1 = Mono::u(1);
        assert_eq!(ch.0.get(&(u1.clone(), vec![pi.clone(), pi.clone(), pi.clone()])), q(-2, 1));
        assert_eq!(ch.0.get(&(u1, vec![vec![], pi.clone(), pi])), q(1, 1));
    }

    #[test]
    fn sesquilinearity() {
        let a = FiniteDga::dual_numbers_koszul();
        let r = Retract::new(&a).unwrap();
        let x = Chain::tensor(vec![2usize, 1]).plus(&Chain::tensor(vec![1usize]));
        let y = Chain::tensor(vec![2usize]).plus(&Chain::tensor(vec![0usize, 2]));
        let base = canonical_pairing(&r, &x, &y).unwrap();
        assert_eq!(canonical_pairing(&r, &x.times_u(1), &y).unwrap(), base.times(&Mono::u(1)));
        assert_eq!(canonical_pairing(&r, &x, &y.times_u(1)).unwrap(), base.times(&Mono::u(1)).scaled(&q(-1, 1)));
    }
}
