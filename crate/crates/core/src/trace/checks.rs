//! Randomized checks of the trace, the Chern character and the pairing.
//!
//! The trace only sees operators of total weight zero, so uniformly drawn
//! tensors over a weighted algebra almost always pair to zero. The samplers
//! below aim the total weight of each tensor at a value where the compared
//! sides can be nonzero, and every check reports how many samples were
//! nontrivial.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::endo::{Atom, RhoImage, Word, WordAlgebra};
use super::pairing::{
    central_trace_checks, chern_character, chern_defect, homotopy_term_check, rho_shuffle_check, upsilon_closed_check,
    upsilon_words, Probe,
};
use super::retract::{GradedAlgebra, Retract};
use crate::bar::suite::{IdentityResult, SuiteReport};
use crate::bar::{Bar, Chain, Coef, Mono};
use crate::dga::{Elem, FiniteDga, SuperAlgebra};
use crate::exact::Rational;

#[derive(Clone, Debug)]
pub struct TraceSpec {
    /// Random samples per check.
    pub samples: usize,
    /// Maximal length of random chains of operators.
    pub word_chain_length: usize,
    /// Maximal number of atoms in a random word.
    pub word_length: usize,
    /// Maximal length of each factor of a random pair.
    pub pair_length: usize,
    /// Basis elements combined in one slot of a random pair.
    pub spread: usize,
    /// Chern character truncation order.
    pub u_order: usize,
}

impl Default for TraceSpec {
    fn default() -> Self {
        TraceSpec { samples: 200, word_chain_length: 3, word_length: 2, pair_length: 2, spread: 2, u_order: 3 }
    }
}

/// Exact `(sh + uSh)` check inside the matrix image, for finite algebras.
pub type ImageCheck<'f, B> = &'f (dyn Fn(&Elem<B>, &Chain<B>, &Chain<B>) -> Probe + Sync);

pub fn finite_image_check<'f>(
    a: &'f FiniteDga,
    img: &'f RhoImage,
) -> impl Fn(&Elem<usize>, &Chain<usize>, &Chain<usize>) -> Probe + Sync + 'f {
    move |c, x, y| rho_shuffle_check(a, img, c, x, y)
}

/// Basis elements grouped by weight.
pub struct Pool<B> {
    all: Vec<B>,
    by_weight: BTreeMap<i64, Vec<B>>,
    nonunit_by_weight: BTreeMap<i64, Vec<B>>,
}

impl<B: Clone> Pool<B> {
    pub fn new<A: SuperAlgebra<Basis = B>>(a: &A, basis: &[B]) -> Self {
        let mut by_weight: BTreeMap<i64, Vec<B>> = BTreeMap::new();
        let mut nonunit_by_weight: BTreeMap<i64, Vec<B>> = BTreeMap::new();
        for b in basis {
            by_weight.entry(a.weight(b)).or_default().push(b.clone());
            if !a.is_unit(b) {
                nonunit_by_weight.entry(a.weight(b)).or_default().push(b.clone());
            }
        }
        Pool { all: basis.to_vec(), by_weight, nonunit_by_weight }
    }

    fn pick(rng: &mut ChaCha8Rng, xs: &[B]) -> B {
        xs[rng.random_range(0..xs.len())].clone()
    }

    fn table(&self, slot: usize) -> &BTreeMap<i64, Vec<B>> {
        if slot == 0 { &self.by_weight } else { &self.nonunit_by_weight }
    }

    /// Weights of the `len + 1` slots, summing to `target` if given.
    fn slot_weights(&self, rng: &mut ChaCha8Rng, len: usize, target: Option<i64>) -> Option<Vec<i64>> {
        for _ in 0..32 {
            let mut ws: Vec<i64> = (0..len)
                .map(|i| {
                    let keys: Vec<i64> = self.table(i).keys().copied().collect();
                    keys[rng.random_range(0..keys.len())]
                })
                .collect();
            let last = match target {
                Some(t) => t - ws.iter().sum::<i64>(),
                None => {
                    let keys: Vec<i64> = self.table(len).keys().copied().collect();
                    keys[rng.random_range(0..keys.len())]
                }
            };
            if self.table(len).contains_key(&last) {
                ws.push(last);
                return Some(ws);
            }
        }
        None
    }

    /// A random chain: each slot is a combination of up to `spread` basis
    /// elements of one weight, expanded multilinearly.
    pub fn chain(&self, rng: &mut ChaCha8Rng, len: usize, target: Option<i64>, spread: usize) -> Option<Chain<B>>
    where
        B: Ord,
    {
        let weights = self.slot_weights(rng, len, target)?;
        let mut acc: Vec<(Bar<B>, Rational)> = vec![(vec![], Rational::one())];
        for (i, w) in weights.iter().enumerate() {
            let xs = &self.table(i)[w];
            let k = rng.random_range(1..=spread.min(xs.len()));
            let picks: Vec<usize> = rand::seq::index::sample(rng, xs.len(), k).into_vec();
            let coefs: Vec<Rational> = picks.iter().map(|_| Rational::from([-2i64, -1, 1, 2][rng.random_range(0..4)])).collect();
            acc = acc
                .into_iter()
                .flat_map(|(t, c)| {
                    picks.iter().zip(&coefs).map(move |(&j, d)| {
                        let mut t = t.clone();
                        t.push(xs[j].clone());
                        (t, &c * d)
                    }).collect::<Vec<_>>()
                })
                .collect();
        }
        let mono = Mono::u(rng.random_range(-1..=1));
        let mut out = Chain::zero();
        for (t, c) in acc {
            out.add_term(mono.clone(), t, c);
        }
        Some(out)
    }
}

fn random_atom<A: GradedAlgebra>(rng: &mut ChaCha8Rng, w: &WordAlgebra<'_, '_, A>, pool: &Pool<A::Basis>) -> Atom<A::Basis> {
    let a = w.r.algebra();
    let n = w.r.ha_dim();
    loop {
        match rng.random_range(0..6) {
            0..=2 => {
                let x = Pool::pick(rng, &pool.all);
                let y = Pool::pick(rng, &pool.all);
                if !(a.is_unit(&x) && a.is_unit(&y)) {
                    return Atom::M(x, y);
                }
            }
            3 => return Atom::H,
            4 if n > 0 => return Atom::P(rng.random_range(0..n)),
            5 => return Atom::D,
            _ => {}
        }
    }
}

/// A random nonzero normal word, nonempty unless `allow_unit`.
fn random_word<A: GradedAlgebra>(
    rng: &mut ChaCha8Rng,
    w: &WordAlgebra<'_, '_, A>,
    pool: &Pool<A::Basis>,
    spec: &TraceSpec,
    allow_unit: bool,
) -> Word<A::Basis> {
    loop {
        let len = rng.random_range(if allow_unit { 0 } else { 1 }..=spec.word_length);
        let raw: Word<A::Basis> = (0..len).map(|_| random_atom(rng, w, pool)).collect();
        if let Some((word, _)) = w.reduce(raw).iter().next() {
            if allow_unit || !word.is_empty() {
                return word.clone();
            }
        }
    }
}

/// Prepends `L_x` with `x` of the missing weight to the last word, keeping it
/// nonzero. Returns `None` when no such element exists.
fn aim_word_tensor<A: GradedAlgebra>(
    rng: &mut ChaCha8Rng,
    w: &WordAlgebra<'_, '_, A>,
    pool: &Pool<A::Basis>,
    t: &mut [Word<A::Basis>],
    target: i64,
) -> Option<()> {
    let a = w.r.algebra();
    let deficit = target - t.iter().map(|x| w.weight(x)).sum::<i64>();
    if deficit == 0 {
        return Some(());
    }
    let xs = pool.nonunit_by_weight.get(&deficit)?;
    let last = t.last_mut().expect("tensor is nonempty");
    let mut word = vec![Atom::M(Pool::pick(rng, xs), a.unit())];
    word.extend(last.iter().cloned());
    let reduced = w.reduce(word).iter().next().map(|(x, _)| x.clone())?;
    *last = reduced;
    Some(())
}

/// A random chain of operators, two tensors with `u`-monomial coefficients,
/// each aimed at a weight where `Upsilon b` or `Upsilon B` can be nonzero.
pub fn random_word_chain<A: GradedAlgebra>(
    rng: &mut ChaCha8Rng,
    w: &WordAlgebra<'_, '_, A>,
    pool: &Pool<A::Basis>,
    spec: &TraceSpec,
) -> Chain<Word<A::Basis>> {
    let s = w.r.algebra().d_shift();
    let mut out = Chain::zero();
    for _ in 0..2 {
        let l = rng.random_range(0..=spec.word_chain_length);
        let mut t = vec![random_word(rng, w, pool, spec, true)];
        t.extend((0..l).map(|_| random_word(rng, w, pool, spec, false)));
        let j: i64 = if rng.random_bool(0.5) { -1 } else { 1 };
        let _ = aim_word_tensor(rng, w, pool, &mut t, (l as i64 + j) * s);
        let u = Mono::u(rng.random_range(-1..=1));
        out.add_term(u, t, Rational::from(rng.random_range(1..=3i64)));
    }
    out
}

/// A random pair `(alpha, beta)` whose combined weight suits the pair checks.
pub fn random_pair<A: GradedAlgebra>(
    rng: &mut ChaCha8Rng,
    r: &Retract<'_, A>,
    pool: &Pool<A::Basis>,
    central_weights: &[i64],
    max_len: usize,
    spread: usize,
) -> (Chain<A::Basis>, Chain<A::Basis>) {
    let a = r.algebra();
    let s = a.d_shift();
    let ws: BTreeSet<i64> = (0..r.ha_dim()).map(|k| r.ha_weight(k)).collect();
    let deltas: Vec<i64> =
        ws.iter().flat_map(|x| ws.iter().map(move |y| x - y)).collect::<BTreeSet<_>>().into_iter().collect();
    let la = rng.random_range(0..=max_len);
    let lb = rng.random_range(0..=max_len);
    let x = pool.chain(rng, la, None, spread).expect("unconstrained draw");
    let wa: i64 = x.iter().next().map(|(_, t, _)| t.iter().map(|b| a.weight(b)).sum()).unwrap_or(0);
    let j = rng.random_range(0..=2i64);
    let wc = if central_weights.is_empty() || rng.random_bool(0.3) {
        0
    } else {
        central_weights[rng.random_range(0..central_weights.len())]
    };
    let delta = if deltas.is_empty() { 0 } else { deltas[rng.random_range(0..deltas.len())] };
    let target = (la as i64 + lb as i64 + j) * s - wc + delta - wa;
    let y = pool
        .chain(rng, lb, Some(target), spread)
        .unwrap_or_else(|| pool.chain(rng, lb, None, spread).expect("draw"));
    (x, y)
}

pub(crate) fn run_parallel(name: &str, anchor: &str, n: usize, f: impl Fn(usize) -> Probe + Sync + Send) -> IdentityResult {
    let outcomes: Vec<Probe> = (0..n).into_par_iter().map(f).collect();
    let mut res = IdentityResult::new(name, anchor);
    for o in outcomes {
        res.record_probe(o);
    }
    res
}

pub(crate) fn sample_rng(seed: u64, salt: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.rotate_left(17) ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs the trace checks on one algebra; `basis` supplies the random entries.
pub fn run_trace_checks<A: GradedAlgebra>(
    name: &str,
    r: &Retract<'_, A>,
    centrals: &[Elem<A::Basis>],
    basis: &[A::Basis],
    image: Option<ImageCheck<'_, A::Basis>>,
    seed: u64,
    spec: &TraceSpec,
) -> SuiteReport {
    let w = WordAlgebra::new(r);
    let a = r.algebra();
    let pool = Pool::new(a, basis);
    let mut results = Vec::new();

    let n = r.ha_dim();
    let m = spec.u_order;
    results.push(run_parallel("chern-cocycle", "(b + uB) ch = 0 mod u^{m+1}", n * (m + 1), |j| {
        let d = chern_defect(&w, j / (m + 1), j % (m + 1));
        if d.is_zero() {
            Ok(true)
        } else {
            Err(format!("projector {} order {}: {} terms", j / (m + 1), j % (m + 1), d.len()))
        }
    }));
    results.push(run_parallel("chern-trace", "Upsilon(ch) = +-1", n, |k| {
        let v = upsilon_words(&w, &chern_character(k, m));
        let one = Coef::constant(Rational::one());
        if v == one || v == one.scaled(&-Rational::one()) {
            Ok(true)
        } else {
            Err(format!("projector {k}: {v}"))
        }
    }));

    results.push(run_parallel("trace-closed", "Upsilon b = -Upsilon uB", spec.samples, |i| {
        upsilon_closed_check(&w, &random_word_chain(&mut sample_rng(seed, 1, i), &w, &pool, spec))
    }));
    results.push(run_parallel("trace-unit-head", "Upsilon(id[T1|...|Tl]) = 0", spec.samples, |i| {
        let mut rng = sample_rng(seed, 2, i);
        let l = rng.random_range(1..=spec.word_chain_length.max(1));
        let mut t = vec![vec![]];
        t.extend((0..l).map(|_| random_word(&mut rng, &w, &pool, spec, false)));
        let _ = aim_word_tensor(&mut rng, &w, &pool, &mut t, l as i64 * a.d_shift());
        let v = upsilon_words(&w, &Chain::tensor(t.clone()));
        if !v.is_zero() {
            return Err(format!("nonzero value {v}"));
        }
        // nontrivial when a projector in the head slot gives a nonzero trace
        t[0] = vec![Atom::P(0)];
        Ok(n > 0 && !upsilon_words(&w, &Chain::tensor(t)).is_zero())
    }));

    let central_weights: Vec<i64> =
        centrals.iter().filter_map(|c| c.iter().next().map(|(b, _)| a.weight(b))).collect();
    let pairs: Vec<_> = (0..spec.samples)
        .map(|i| random_pair(&mut sample_rng(seed, 3, i), r, &pool, &central_weights, spec.pair_length, spec.spread))
        .collect();
    let names = [
        ("central-b", "Upsilon C(rho) sh (b(c) (x) 1 - 1 (x) b(c)) = 0"),
        ("central-e", "Upsilon C(rho) sh (e(c) (x) 1 - 1 (x) e(c)) = 0"),
        ("central-big-e", "Upsilon C(rho) sh (E(c) (x) 1 - 1 (x) E~(c)) = 0"),
    ];
    let mut central: Vec<IdentityResult> = names.iter().map(|(n, an)| IdentityResult::new(n, an)).collect();
    let mut image_res = IdentityResult::new("shuffle-image", "C(rho)(sh + uSh)(b(c) (x) 1 - 1 (x) b(c)) = 0");
    let mut homotopy_res = IdentityResult::new(
        "homotopy-term",
        "Upsilon C(rho)(sh + uSh)((e(d) + uE(d)) (x) 1)(1 (x) B)(b(c) (x) 1 - 1 (x) b(c)) = 0",
    );
    for c in centrals {
        let outcomes: Vec<_> = pairs
            .par_iter()
            .map(|(x, y)| {
                let three = central_trace_checks(r, c, x, y);
                let img = image.map(|f| f(c, x, y));
                (three, img, homotopy_term_check(r, c, x, y))
            })
            .collect();
        for (three, img, hom) in outcomes {
            for (res, o) in central.iter_mut().zip(three) {
                res.record_probe(o);
            }
            if let Some(o) = img {
                image_res.record_probe(o);
            }
            homotopy_res.record_probe(hom);
        }
    }
    results.extend(central);
    if image.is_some() {
        results.push(image_res);
    }
    results.push(homotopy_res);
    if let Err(e) = r.check_escape() {
        let mut res = IdentityResult::new("window", "homology vanishes outside the window");
        res.record(Err(e.to_string()));
        results.push(res);
    }
    SuiteReport { algebra: name.into(), results }
}

/// The three central-element trace identities on every pair of basis
/// tensors of length at most `max_len`.
pub fn exhaustive_central_checks<A: GradedAlgebra>(
    r: &Retract<'_, A>,
    c: &Elem<A::Basis>,
    basis: &[A::Basis],
    max_len: usize,
) -> Vec<IdentityResult> {
    let a = r.algebra();
    let mut tensors: Vec<Bar<A::Basis>> = basis.iter().map(|b| vec![b.clone()]).collect();
    let mut frontier = tensors.clone();
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|t| {
                basis.iter().filter(|b| !a.is_unit(b)).map(move |b| {
                    let mut t = t.clone();
                    t.push(b.clone());
                    t
                })
            })
            .collect();
        tensors.extend(frontier.iter().cloned());
    }
    let outcomes: Vec<[Probe; 3]> = tensors
        .par_iter()
        .flat_map(|t| tensors.par_iter().map(move |s| (t, s)))
        .map(|(t, s)| central_trace_checks(r, c, &Chain::tensor(t.clone()), &Chain::tensor(s.clone())))
        .collect();
    let mut res: Vec<IdentityResult> = [
        ("central-b-exhaustive", "Upsilon C(rho) sh (b(c) (x) 1 - 1 (x) b(c)) = 0"),
        ("central-e-exhaustive", "Upsilon C(rho) sh (e(c) (x) 1 - 1 (x) e(c)) = 0"),
        ("central-big-e-exhaustive", "Upsilon C(rho) sh (E(c) (x) 1 - 1 (x) E~(c)) = 0"),
    ]
    .iter()
    .map(|(n, an)| IdentityResult::new(n, an))
    .collect();
    for three in outcomes {
        for (r, o) in res.iter_mut().zip(three) {
            r.record_probe(o);
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{zoo, MfAlgebra};
    use crate::poly::{WPoly, WeightSystem};

    fn assert_all(rep: &SuiteReport) {
        for res in &rep.results {
            assert!(res.passed(), "{} {}: {:?}", rep.algebra, res.name, res.witness);
        }
    }

    #[test]
    fn finite_examples_pass() {
        let spec = TraceSpec { samples: 12, ..TraceSpec::default() };
        for name in ["exterior2", "dual-koszul", "mf-x2-mod-x2"] {
            let a = zoo::random_test_dga(name, 1).unwrap();
            let r = Retract::new(&a).unwrap();
            let img = RhoImage::new(&a);
            let check = finite_image_check(&a, &img);
            let centrals: Vec<_> = a.centrals().iter().map(|c| c.elem.clone()).collect();
            assert_all(&run_trace_checks(name, &r, &centrals, &a.basis(), Some(&check), 7, &spec));
        }
    }

    fn a_f(n: u32) -> MfAlgebra {
        let f = WPoly::monomial(vec![n]);
        let ws = WeightSystem::new(vec![1], n as i64).unwrap();
        MfAlgebra::new(&f, &ws, None).unwrap()
    }

    #[test]
    fn quadric_random_checks_pass() {
        let a = a_f(2);
        let r = Retract::new(&a).unwrap();
        let basis: Vec<_> = (0..=3).flat_map(|w| a.basis_of_weight(w)).collect();
        let centrals: Vec<_> = a.centrals().into_iter().map(|c| c.elem).collect();
        let spec = TraceSpec { samples: 24, ..TraceSpec::default() };
        assert_all(&run_trace_checks("x2", &r, &centrals, &basis, None, 11, &spec));
    }

    #[test]
    fn cubic_exhaustive_checks_are_nontrivial() {
        let a = a_f(3);
        let r = Retract::new(&a).unwrap();
        let basis: Vec<_> = (0..=5).flat_map(|w| a.basis_of_weight(w)).collect();
        let c = a.centrals()[0].elem.clone();
        for res in exhaustive_central_checks(&r, &c, &basis, 1) {
            assert!(res.passed(), "{}: {:?}", res.name, res.witness);
            assert!(res.nontrivial.unwrap() > 0, "{} never nontrivial", res.name);
        }
    }
}
