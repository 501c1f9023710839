//! Milnor classes of `-df`-closed forms and a greedy search for Hochschild
//! cycles of `A_f` whose images span the Milnor algebra.
//!
//! Chains are graded by `deg' = sum of slot weights - s * l` on `a0[a1|...|al]`,
//! `s` the weight of `D_f`. Then `b` raises `deg'` by `s`, `B` lowers it by
//! `s`, and `I_f` sends `deg' = v + sum w_i - n s` to classes of weight `v`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::forms::Form;
use super::map::SegalMap;
use crate::bar::{Bar, Chain, Mono};
use crate::dga::{MfBasis, SuperAlgebra};
use crate::exact::matrix::{kernel_basis_sparse, Echelon};
use crate::exact::{Rational, SVec, SparseMatrix};
use crate::poly::MilnorData;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SegalError {
    #[error("not a cocycle: df ^ omega != 0")]
    NotACocycle,
    #[error("span not reached: {found} of {mu} classes with length cap {cap}; missing weights {missing:?}")]
    SpanNotReached { found: usize, mu: usize, cap: usize, missing: Vec<i64> },
}

/// Coordinates in the Milnor basis of the `u^0` top-degree part of a
/// `-df`-closed form. Lower degrees carry no cohomology and are dropped.
pub fn milnor_class(w: &Form, md: &MilnorData) -> Result<Vec<Rational>, SegalError> {
    if !w.wedge_d(md.f()).is_zero() {
        return Err(SegalError::NotACocycle);
    }
    let xi = w.top_coefficient(md.weights().n(), &Mono::one());
    Ok(md.normal_form(&xi))
}

/// `deg'` of a tensor.
pub fn tensor_degree(sm: &SegalMap<'_>, t: &[MfBasis]) -> i64 {
    let s = sm.algebra().shift();
    t.iter().map(|b| sm.weight(b)).sum::<i64>() - s * (t.len() as i64 - 1)
}

/// `deg'` of the cycles whose images have Milnor weight `v`.
pub fn degree_for_weight(sm: &SegalMap<'_>, v: i64) -> i64 {
    let ws = sm.algebra().weights();
    v + ws.weights().iter().sum::<i64>() - ws.n() as i64 * ws.half()
}

/// Normalized tensors of bar length `l` with the given `deg'` and parity, in
/// sorted order.
pub struct Slicer<'s, 'a> {
    sm: &'s SegalMap<'a>,
    by_weight: HashMap<i64, Vec<MfBasis>>,
    min_weight: i64,
    /// Slot elements allowed in restricted slices besides generators.
    extra: BTreeSet<MfBasis>,
}

impl<'s, 'a> Slicer<'s, 'a> {
    pub fn new(sm: &'s SegalMap<'a>) -> Self {
        let a = sm.algebra();
        let e = a.endp();
        let min_weight = (0..e.dim()).map(|t| e.weight(t, a.theta_weights())).min().unwrap_or(0);
        Slicer { sm, by_weight: HashMap::new(), min_weight, extra: BTreeSet::new() }
    }

    fn of_weight(&mut self, w: i64) -> &[MfBasis] {
        let a = self.sm.algebra();
        self.by_weight.entry(w).or_insert_with(|| a.basis_of_weight(w))
    }

    pub fn tensors(&mut self, degree: i64, l: usize, parity: usize) -> Vec<Bar<MfBasis>> {
        self.collect(degree, l, parity, false)
    }

    /// Tensors whose bar slots are `x^e theta_i`, `x^e dtheta_i`, `x_i` or one of
    /// the extra elements.
    pub fn set_extra(&mut self, extra: BTreeSet<MfBasis>) {
        self.extra = extra;
    }

    pub fn generator_tensors(&mut self, degree: i64, l: usize, parity: usize) -> Vec<Bar<MfBasis>> {
        self.collect(degree, l, parity, true)
    }

    fn collect(&mut self, degree: i64, l: usize, parity: usize, restricted: bool) -> Vec<Bar<MfBasis>> {
        let total = degree + self.sm.algebra().shift() * l as i64;
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(l + 1);
        self.fill(total, l + 1, restricted, &mut cur, &mut out);
        let ops = self.sm.ops();
        out.retain(|t| ops.tensor_parity(t) == parity);
        out.sort();
        out
    }

    fn slot_ok(&self, b: &MfBasis, restricted: bool) -> bool {
        let a = self.sm.algebra();
        if a.is_unit(b) {
            return false;
        }
        if !restricted {
            return true;
        }
        let e = a.endp();
        (0..a.n()).any(|i| b.t == e.theta(i) || b.t == e.dtheta(i))
            || (b.t == a.unit().t && b.x.iter().sum::<u32>() == 1)
            || self.extra.contains(b)
    }

    fn fill(&mut self, rest: i64, slots: usize, restricted: bool, cur: &mut Vec<MfBasis>, out: &mut Vec<Bar<MfBasis>>) {
        if slots == 1 {
            let head = cur.is_empty();
            for b in self.of_weight(rest).to_vec() {
                if head || self.slot_ok(&b, restricted) {
                    cur.push(b);
                    out.push(cur.clone());
                    cur.pop();
                }
            }
            return;
        }
        let hi = rest - (slots as i64 - 1) * self.min_weight;
        for w in self.min_weight..=hi {
            let head = cur.is_empty();
            for b in self.of_weight(w).to_vec() {
                if head || self.slot_ok(&b, restricted) {
                    cur.push(b);
                    self.fill(rest - w, slots - 1, restricted, cur, out);
                    cur.pop();
                }
            }
        }
    }

    /// Number of tensors of bar length `l` and this `deg'` (either parity),
    /// counted only up to `cap + 1`.
    pub fn count(&mut self, degree: i64, l: usize, _parity: usize, cap: usize) -> usize {
        let total = degree + self.sm.algebra().shift() * l as i64;
        self.count_rec(total, l + 1, true, cap + 1)
    }

    fn count_rec(&mut self, rest: i64, slots: usize, head: bool, cap: usize) -> usize {
        let a = self.sm.algebra();
        let units = |s: &mut Self, w: i64| if head { 0 } else { s.of_weight(w).iter().filter(|b| a.is_unit(b)).count() };
        if slots == 1 {
            let u = units(self, rest);
            return self.of_weight(rest).len() - u;
        }
        let hi = rest - (slots as i64 - 1) * self.min_weight;
        let mut total = 0usize;
        for w in self.min_weight..=hi {
            let here = self.of_weight(w).len() - units(self, w);
            if here == 0 {
                continue;
            }
            let below = self.count_rec(rest - w, slots - 1, false, cap);
            total = total.saturating_add(here.saturating_mul(below));
            if total >= cap {
                return cap;
            }
        }
        total
    }

    /// All tensors with bar length at most `max_l`.
    pub fn slice(&mut self, degree: i64, max_l: usize, parity: usize) -> Vec<Bar<MfBasis>> {
        (0..=max_l).flat_map(|l| self.tensors(degree, l, parity)).collect()
    }

    pub fn generator_slice(&mut self, degree: i64, max_l: usize, parity: usize) -> Vec<Bar<MfBasis>> {
        (0..=max_l).flat_map(|l| self.generator_tensors(degree, l, parity)).collect()
    }
}

/// Matrix of `b` on the given columns; rows are indexed on the fly.
pub fn b_matrix(sm: &SegalMap<'_>, cols: &[Bar<MfBasis>]) -> SparseMatrix {
    let ops = sm.ops();
    let mut rows: BTreeMap<Bar<MfBasis>, usize> = BTreeMap::new();
    let images: Vec<Vec<(Bar<MfBasis>, Rational)>> =
        cols.iter().map(|t| ops.b(t).iter().map(|(k, c)| (k.clone(), c.clone())).collect()).collect();
    for img in &images {
        for (k, _) in img {
            let next = rows.len();
            rows.entry(k.clone()).or_insert(next);
        }
    }
    let columns: Vec<SVec> = images
        .iter()
        .map(|img| {
            let mut v: SVec = img.iter().map(|(k, c)| (rows[k], c.clone())).collect();
            v.sort_by_key(|(i, _)| *i);
            v
        })
        .collect();
    SparseMatrix::from_columns(rows.len(), &columns)
}

pub fn chain_from(cols: &[Bar<MfBasis>], v: &SVec) -> Chain<MfBasis> {
    let mut out = Chain::zero();
    for (i, c) in v {
        out.add_term(Mono::one(), cols[*i].clone(), c.clone());
    }
    out
}

/// Some `x` with `b x = rhs`, `rhs` a `u`- and `z`-free chain of the given
/// `deg' + s` and parity `parity + 1`, searched over generator slices and then
/// full slices of bar length up to `max_l`.
pub fn solve_b(
    sm: &SegalMap<'_>,
    slicer: &mut Slicer<'_, '_>,
    rhs: &Chain<MfBasis>,
    degree: i64,
    parity: usize,
    max_l: usize,
    slice_cap: usize,
) -> Option<Chain<MfBasis>> {
    if rhs.is_zero() {
        return Some(Chain::zero());
    }
    slicer.extra = rhs.iter().flat_map(|(_, t, _)| t.iter().cloned()).collect();
    for l in 0..=max_l {
        let mut x = solve_on(sm, &slicer.generator_slice(degree, l, parity), rhs);
        if x.is_none() {
            let full: usize = (0..=l).map(|k| slicer.count(degree, k, parity, slice_cap)).sum();
            if full <= slice_cap {
                x = solve_on(sm, &slicer.slice(degree, l, parity), rhs);
            }
        }
        if x.is_some() {
            slicer.extra.clear();
            return x;
        }
    }
    slicer.extra.clear();
    None
}

pub fn solve_on(sm: &SegalMap<'_>, cols: &[Bar<MfBasis>], rhs: &Chain<MfBasis>) -> Option<Chain<MfBasis>> {
    let ops = sm.ops();
    let mut rows: BTreeMap<Bar<MfBasis>, usize> = BTreeMap::new();
    let mut index = |k: &Bar<MfBasis>| {
        let next = rows.len();
        *rows.entry(k.clone()).or_insert(next)
    };
    let mut columns: Vec<SVec> = Vec::with_capacity(cols.len());
    for t in cols {
        let mut v: SVec = ops.b(t).iter().map(|(k, c)| (index(k), c.clone())).collect();
        v.sort_by_key(|(i, _)| *i);
        columns.push(v);
    }
    let mut target: SVec = rhs.iter().map(|(_, t, c)| (index(t), c.clone())).collect();
    target.sort_by_key(|(i, _)| *i);
    // Columns outside the connected component of the target rows never enter a solution.
    let mut parent: Vec<usize> = (0..rows.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for c in &columns {
        if let Some(&(first, _)) = c.first() {
            for (i, _) in c {
                let (a, b) = (root(&mut parent, first), root(&mut parent, *i));
                parent[a] = b;
            }
        }
    }
    let live: BTreeSet<usize> = target.iter().map(|(i, _)| root(&mut parent, *i)).collect();
    let keep: Vec<usize> = (0..columns.len())
        .filter(|&j| columns[j].first().is_some_and(|&(i, _)| live.contains(&root(&mut parent, i))))
        .collect();
    let sub: Vec<SVec> = keep.iter().map(|&j| std::mem::take(&mut columns[j])).collect();
    let x = crate::exact::matrix::solve_columns(&sub, &target)?;
    let x: SVec = x.into_iter().map(|(j, v)| (keep[j], v)).collect();
    Some(chain_from(cols, &x))
}

/// A cycle together with the Milnor class of its image.
#[derive(Clone, Debug)]
pub struct FoundCycle {
    pub chain: Chain<MfBasis>,
    pub class: Vec<Rational>,
    pub degree: i64,
    pub length: usize,
}

/// Bounds for [`find_cycles`].
#[derive(Clone, Copy, Debug)]
pub struct CycleSearch {
    pub length_cap: usize,
    /// Largest full slice (in tensors) tried after the generator slice.
    pub slice_cap: usize,
}

impl Default for CycleSearch {
    fn default() -> Self {
        CycleSearch { length_cap: 3, slice_cap: 20_000 }
    }
}

/// Greedily collects `mu` Hochschild cycles with independent images. For
/// each bar length up to the cap it first searches tensors with generator
/// slots, then the full slice when that is small enough.
pub fn find_cycles(sm: &SegalMap<'_>, md: &MilnorData, search: CycleSearch) -> Result<Vec<FoundCycle>, SegalError> {
    let n = sm.n();
    let mut wanted: BTreeMap<i64, usize> = BTreeMap::new();
    for i in 0..md.mu() {
        *wanted.entry(md.basis_weight(i)).or_default() += 1;
    }
    let mut slicer = Slicer::new(sm);
    let mut span = Echelon::new();
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for (&v, &count) in &wanted {
        let degree = degree_for_weight(sm, v);
        let mut got = 0;
        'len: for l in 0..=search.length_cap {
            let mut stages = vec![slicer.generator_slice(degree, l, n % 2)];
            let full: usize = (0..=l).map(|k| slicer.count(degree, k, n % 2, search.slice_cap)).sum();
            if full <= search.slice_cap {
                stages.push(slicer.slice(degree, l, n % 2));
            }
            for cols in stages {
            for k in kernel_basis_sparse(&b_matrix(sm, &cols)) {
                let chain = chain_from(&cols, &k);
                let class = milnor_class(&sm.apply(&chain), md)?;
                let sv: SVec = class.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect();
                if span.insert(sv).is_some() {
                    let length = chain.max_length();
                    found.push(FoundCycle { chain, class, degree, length });
                    got += 1;
                    if got == count {
                        break 'len;
                    }
                }
            }
            }
        }
        if got < count {
            missing.push(v);
        }
    }
    if !missing.is_empty() {
        return Err(SegalError::SpanNotReached { found: found.len(), mu: md.mu(), cap: search.length_cap, missing });
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::MfAlgebra;
    use crate::exact::q;
    use crate::poly::{milnor_data, WPoly, WeightSystem};

    fn setup(f: WPoly, w: Vec<i64>, total: i64) -> (MfAlgebra, MilnorData) {
        let ws = WeightSystem::new(w, total).unwrap();
        let md = milnor_data(&f, &ws).unwrap();
        (MfAlgebra::new(&f, &ws, None).unwrap(), md)
    }

    #[test]
    fn class_of_two_dx() {
        let (a, md) = setup(WPoly::monomial(vec![2]), vec![1], 2);
        let _ = a;
        let w = Form::term(Mono::one(), vec![0], 1, q(2, 1));
        assert_eq!(milnor_class(&w, &md).unwrap(), vec![q(2, 1)]);
    }

    #[test]
    fn exact_forms_have_zero_class() {
        let (_, md) = setup(WPoly::monomial(vec![3]), vec![1], 3);
        let eta = Form::term(Mono::one(), vec![1], 0, q(1, 1));
        let w = eta.wedge_d(md.f());
        assert!(milnor_class(&w, &md).unwrap().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn functions_are_not_cocycles() {
        let (_, md) = setup(WPoly::monomial(vec![2]), vec![1], 2);
        let w = Form::term(Mono::one(), vec![0], 0, q(1, 1));
        assert_eq!(milnor_class(&w, &md), Err(SegalError::NotACocycle));
    }

    #[test]
    fn quadric_cycle_is_theta_minus_dtheta() {
        let (a, md) = setup(WPoly::monomial(vec![2]), vec![1], 2);
        let sm = SegalMap::new(&a);
        let cyc = find_cycles(&sm, &md, CycleSearch { length_cap: 2, ..Default::default() }).unwrap();
        assert_eq!(cyc.len(), 1);
        assert_eq!(cyc[0].length, 0);
        let c = &cyc[0].chain;
        let th = c.0.get(&(Mono::one(), vec![a.theta(0)]));
        let dth = c.0.get(&(Mono::one(), vec![a.dtheta(0)]));
        assert!(!th.is_zero());
        assert_eq!(th, -dth);
    }

    #[test]
    fn pure_powers_reach_full_span() {
        for nn in 2..=5u32 {
            let (a, md) = setup(WPoly::monomial(vec![nn]), vec![1], nn as i64);
            let sm = SegalMap::new(&a);
            let cyc = find_cycles(&sm, &md, CycleSearch::default()).unwrap();
            assert_eq!(cyc.len(), nn as usize - 1);
            for c in &cyc {
                assert!(sm.ops().apply(crate::bar::Op::B, &c.chain).is_zero());
            }
        }
    }
}
