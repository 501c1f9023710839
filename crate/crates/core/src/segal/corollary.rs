//! The canonical pairing on computed cycles against the residue pairing of
//! their images, and flatness of the extended pairing on lifted cycles.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cycles::{find_cycles, milnor_class, solve_b, tensor_degree, CycleSearch, FoundCycle, SegalError, Slicer};
use super::map::SegalMap;
use crate::bar::{Chain, Coef, Mono, Op};
use crate::dga::{MfAlgebra, MfBasis, MfError};
use crate::exact::{Rational, SparseMatrix};
use crate::poly::{milnor_data, MilnorData, MilnorError, WPoly, WeightSystem};
use crate::trace::{canonical_pairing, eta_hh, Retract, RetractError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorollaryError {
    #[error(transparent)]
    Mf(#[from] MfError),
    #[error(transparent)]
    Milnor(#[from] MilnorError),
    #[error(transparent)]
    Retract(#[from] RetractError),
    #[error(transparent)]
    Segal(#[from] SegalError),
    #[error("degenerate Gram: det GramA = 0")]
    DegenerateGram,
    #[error("proportionality violated at ({i}, {j}): GramF = {f}, GramA = {a}, const = {c}")]
    Proportionality { i: usize, j: usize, f: Rational, a: Rational, c: Rational },
    #[error("const not invariant under {what}: {base} vs {got}")]
    NotInvariant { what: String, base: Rational, got: Rational },
    #[error("cycle lift failed at u^{j} z^{k} for cycle {cycle}")]
    LiftFailed { cycle: usize, j: usize, k: usize },
}

#[derive(Clone, Debug, Default)]
pub struct CorollaryOptions {
    pub search: CycleSearch,
    /// Retract window and margin; the algebra's defaults when `None`.
    pub window: Option<((i64, i64), i64)>,
    pub parts: Option<Vec<WPoly>>,
    /// Decomposition for the invariance re-run; derived automatically when `None`.
    pub alt_parts: Option<Vec<WPoly>>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    Zero,
    Neither,
}

impl Symmetry {
    pub fn of(m: &[Vec<Rational>]) -> Symmetry {
        let k = m.len();
        let sym = (0..k).all(|i| (0..k).all(|j| m[i][j] == m[j][i]));
        let anti = (0..k).all(|i| (0..k).all(|j| m[i][j] == -&m[j][i]));
        match (sym, anti) {
            (true, true) => Symmetry::Zero,
            (true, false) => Symmetry::Symmetric,
            (false, true) => Symmetry::Antisymmetric,
            (false, false) => Symmetry::Neither,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Antisymmetric => "antisymmetric",
            Symmetry::Zero => "zero",
            Symmetry::Neither => "neither",
        }
    }
}

/// One invariance re-run: the recomputed constant, or why it does not apply.
#[derive(Clone, Debug)]
pub struct InvarianceCheck {
    pub name: &'static str,
    pub constant: Option<Rational>,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct CorollaryReport {
    pub n: usize,
    pub mu: usize,
    pub cycles: Vec<FoundCycle>,
    pub gram_a: Vec<Vec<Rational>>,
    pub gram_f: Vec<Vec<Rational>>,
    pub det_a: Rational,
    pub constant: Rational,
    pub conjectured: Rational,
    pub matches_conjecture: bool,
    pub symmetry_a: Symmetry,
    pub symmetry_f: Symmetry,
    pub invariance: Vec<InvarianceCheck>,
    pub elapsed: Duration,
}

/// `(-1)^{n(n+1)/2}`.
pub fn conjectured_constant(n: usize) -> Rational {
    Rational::sign(n * (n + 1) / 2)
}

pub fn retract_for<'a>(a: &'a MfAlgebra, window: Option<((i64, i64), i64)>) -> Result<Retract<'a, MfAlgebra>, RetractError> {
    match window {
        Some((w, m)) => Retract::with_window(a, w, m),
        None => Retract::new(a),
    }
}

pub struct Grams {
    pub classes: Vec<Vec<Rational>>,
    pub gram_a: Vec<Vec<Rational>>,
    pub gram_f: Vec<Vec<Rational>>,
}

/// `GramA[i][j] = eta(alpha_i, alpha_j)` and `GramF[i][j] = eta_f(v_i, v_j)`
/// with `v_i` the Milnor class of `I_f(alpha_i)`.
pub fn grams(
    sm: &SegalMap<'_>,
    r: &Retract<'_, MfAlgebra>,
    md: &MilnorData,
    chains: &[Chain<MfBasis>],
) -> Result<Grams, CorollaryError> {
    let classes: Vec<Vec<Rational>> =
        chains.iter().map(|c| milnor_class(&sm.apply(c), md)).collect::<Result<_, _>>()?;
    let polys: Vec<WPoly> = classes.iter().map(|c| md.expand(c)).collect();
    let k = chains.len();
    let gram_f = (0..k).map(|i| (0..k).map(|j| md.residue_pairing(&polys[i], &polys[j])).collect()).collect();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let vals: Vec<Rational> =
        pairs.par_iter().map(|&(i, j)| eta_hh(r, &chains[i], &chains[j])).collect::<Result<_, _>>()?;
    let gram_a = (0..k).map(|i| vals[i * k..(i + 1) * k].to_vec()).collect();
    Ok(Grams { classes, gram_a, gram_f })
}

/// The single `const` with `GramF = const GramA`.
pub fn proportionality(gram_a: &[Vec<Rational>], gram_f: &[Vec<Rational>]) -> Result<Rational, CorollaryError> {
    let k = gram_a.len();
    let det = SparseMatrix::from_dense(gram_a).determinant();
    if det.is_zero() {
        return Err(CorollaryError::DegenerateGram);
    }
    let (i0, j0) = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .find(|&(i, j)| !gram_a[i][j].is_zero())
        .expect("nonzero determinant");
    let c = &gram_f[i0][j0] / &gram_a[i0][j0];
    for i in 0..k {
        for j in 0..k {
            if gram_f[i][j] != &c * &gram_a[i][j] || c.is_zero() {
                return Err(CorollaryError::Proportionality {
                    i,
                    j,
                    f: gram_f[i][j].clone(),
                    a: gram_a[i][j].clone(),
                    c,
                });
            }
        }
    }
    Ok(c)
}

/// `f_i + m x_j`, `f_j - m x_i` for the first pair `i < j` admitting a
/// monomial `m` of weight `W - w_i - w_j`.
pub fn alternative_parts(a: &MfAlgebra) -> Option<Vec<WPoly>> {
    let ws = a.weights();
    let n = ws.n();
    for i in 0..n {
        for j in i + 1..n {
            let w = ws.total() - ws.weight(i) - ws.weight(j);
            if w < 0 {
                continue;
            }
            if let Some(m) = ws.monomials_of_weight(w).into_iter().next() {
                let m = WPoly::monomial(m);
                let mut parts = a.parts().to_vec();
                parts[i] = &parts[i] + &(&m * &WPoly::var(n, j));
                parts[j] = &parts[j] - &(&m * &WPoly::var(n, i));
                return Some(parts);
            }
        }
    }
    None
}

fn constant_for(
    f: &WPoly,
    ws: &WeightSystem,
    parts: Option<Vec<WPoly>>,
    opts: &CorollaryOptions,
) -> Result<Rational, CorollaryError> {
    let a = MfAlgebra::new(f, ws, parts)?;
    let md = milnor_data(f, ws)?;
    let sm = SegalMap::new(&a);
    let cycles = find_cycles(&sm, &md, opts.search)?;
    let r = retract_for(&a, opts.window)?;
    let chains: Vec<Chain<MfBasis>> = cycles.into_iter().map(|c| c.chain).collect();
    let g = grams(&sm, &r, &md, &chains)?;
    proportionality(&g.gram_a, &g.gram_f)
}

/// Cycle basis change by a fixed unimodular-up-to-scaling integer matrix.
fn change_basis(chains: &[Chain<MfBasis>]) -> Vec<Chain<MfBasis>> {
    let k = chains.len();
    (0..k)
        .map(|i| {
            // row i of (lower unitriangular) with rows reversed, first row doubled
            let src = k - 1 - i;
            let mut out = chains[src].scaled(&Rational::from(if i == 0 { 2i64 } else { 1 }));
            for j in 0..src {
                out.add_scaled(&chains[j], &Rational::from((j + 1) as i64));
            }
            out
        })
        .collect()
}

/// `alpha + b(gamma)` with `gamma` a short random combination of
/// generator-slot tensors of the matching degree.
fn add_boundaries(
    sm: &SegalMap<'_>,
    cycles: &[FoundCycle],
    seed: u64,
) -> (Vec<Chain<MfBasis>>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slicer = Slicer::new(sm);
    let s = sm.algebra().shift();
    let parity = (sm.n() + 1) % 2;
    let ops = sm.ops();
    let mut changed = 0;
    let out = cycles
        .iter()
        .map(|c| {
            let cols = slicer.generator_slice(c.degree - s, c.length + 1, parity);
            let mut gamma = Chain::zero();
            for t in cols.iter().take(6) {
                let k = Rational::from(rng.random_range(1..=3i64));
                gamma.add_term(Mono::one(), t.clone(), k);
            }
            let bg = ops.apply(Op::B, &gamma);
            if !bg.is_zero() {
                changed += 1;
            }
            c.chain.plus(&bg)
        })
        .collect();
    (out, changed)
}

/// Builds the cycles and both Gram matrices, finds `const`, and re-runs the
/// computation under a basis change, boundary shifts and another
/// decomposition of `f`.
pub fn verify_corollary(f: &WPoly, ws: &WeightSystem, opts: &CorollaryOptions) -> Result<CorollaryReport, CorollaryError> {
    let start = Instant::now();
    let a = MfAlgebra::new(f, ws, opts.parts.clone())?;
    let md = milnor_data(f, ws)?;
    let sm = SegalMap::new(&a);
    let cycles = find_cycles(&sm, &md, opts.search)?;
    let r = retract_for(&a, opts.window)?;
    let chains: Vec<Chain<MfBasis>> = cycles.iter().map(|c| c.chain.clone()).collect();
    let g = grams(&sm, &r, &md, &chains)?;
    let det_a = SparseMatrix::from_dense(&g.gram_a).determinant();
    let constant = proportionality(&g.gram_a, &g.gram_f)?;

    let mut invariance = Vec::new();
    let same = |what: &str, got: Rational| -> Result<Rational, CorollaryError> {
        if got == constant {
            Ok(got)
        } else {
            Err(CorollaryError::NotInvariant { what: what.into(), base: constant.clone(), got })
        }
    };

    let moved = change_basis(&chains);
    let gb = grams(&sm, &r, &md, &moved)?;
    let cb = same("basis change", proportionality(&gb.gram_a, &gb.gram_f)?)?;
    invariance.push(InvarianceCheck { name: "basis-change", constant: Some(cb), note: "reversed, triangular, rescaled".into() });

    let (shifted, changed) = add_boundaries(&sm, &cycles, opts.seed);
    let gh = grams(&sm, &r, &md, &shifted)?;
    let ch = same("homologous representatives", proportionality(&gh.gram_a, &gh.gram_f)?)?;
    invariance.push(InvarianceCheck {
        name: "homologous",
        constant: Some(ch),
        note: format!("{changed} of {} cycles shifted by a nonzero boundary", cycles.len()),
    });

    let alt = opts.alt_parts.clone().or_else(|| alternative_parts(&a));
    match alt {
        Some(parts) => {
            let note = format!(
                "f_i = {}",
                parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
            );
            let cd = same("decomposition", constant_for(f, ws, Some(parts), opts)?)?;
            invariance.push(InvarianceCheck { name: "decomposition", constant: Some(cd), note });
        }
        None => invariance.push(InvarianceCheck {
            name: "decomposition",
            constant: None,
            note: "not applicable: the decomposition f = sum x_i f_i is unique for these weights".into(),
        }),
    }

    let n = sm.n();
    let conjectured = conjectured_constant(n);
    Ok(CorollaryReport {
        n,
        mu: md.mu(),
        symmetry_a: Symmetry::of(&g.gram_a),
        symmetry_f: Symmetry::of(&g.gram_f),
        cycles,
        gram_a: g.gram_a,
        gram_f: g.gram_f,
        det_a,
        matches_conjecture: constant == conjectured,
        constant,
        conjectured,
        invariance,
        elapsed: start.elapsed(),
    })
}

/// Residuals of the two flatness identities for one pair of lifted cycles,
/// restricted to the coefficients that the truncated lifts determine exactly.
#[derive(Clone, Debug)]
pub struct FlatnessEntry {
    pub i: usize,
    pub j: usize,
    pub residual_u: Coef,
    pub residual_z: Coef,
    /// Nonzero in-range coefficients of the individual terms of both identities.
    pub live_terms: usize,
}

/// How the `z`-direction of a lift is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZLift {
    /// `exp(zT)` applied to a `b + uB` lift; `nabla_z` vanishes on it.
    Exponential,
    /// Order-by-order solution of `b + uB + z b(g)` in the box `u^J z^K`.
    Solved,
}

/// Truncation of the lifts: `u`-order `J` and `z`-order `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlatnessOrders {
    pub u_order: usize,
    pub z_order: usize,
    pub z_lift: ZLift,
}

impl Default for FlatnessOrders {
    fn default() -> Self {
        FlatnessOrders { u_order: 1, z_order: 3, z_lift: ZLift::Exponential }
    }
}

impl FlatnessOrders {
    fn bounds(&self) -> (i32, i32) {
        (self.u_order as i32, self.z_order as i32)
    }

    /// `u^a z^c` coefficients of the `u`-identity fixed by the truncation.
    pub fn exact_u(&self, a: i32, c: i32) -> bool {
        let (j, k) = self.bounds();
        match self.z_lift {
            ZLift::Exponential => a + c + 2 <= j && c <= k,
            ZLift::Solved => a + 2 <= j && c <= k,
        }
    }

    /// `u^a z^c` coefficients of the `z`-identity fixed by the truncation.
    pub fn exact_z(&self, a: i32, c: i32) -> bool {
        let (j, k) = self.bounds();
        match self.z_lift {
            ZLift::Exponential => a + c + 1 <= j && c < k,
            ZLift::Solved => a + 1 <= j && c < k,
        }
    }

    /// Monomials at which the lift must be closed.
    fn closed_at(&self, a: i32, c: i32) -> bool {
        let (j, k) = self.bounds();
        match self.z_lift {
            ZLift::Exponential => a + c <= j && c <= k,
            ZLift::Solved => a <= j && c <= k,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub orders: FlatnessOrders,
    pub entries: Vec<FlatnessEntry>,
}

impl FlatnessReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.residual_u.is_zero() && e.residual_z.is_zero())
    }

    pub fn nontrivial(&self) -> usize {
        self.entries.iter().filter(|e| e.live_terms > 0).count()
    }
}

/// Lifts a Hochschild cycle to a cycle of `b + uB + z b(g)` modulo
/// `(u^{J+1}, z^{K+1})` for `(J, K) = order`, solving order by order.
pub fn lift_cycle(
    sm: &SegalMap<'_>,
    g: &WPoly,
    cycle: &FoundCycle,
    order: (usize, usize),
    slice_cap: usize,
) -> Result<Chain<MfBasis>, (usize, usize)> {
    let ops = sm.ops();
    let ge = sm.central(g);
    let s = sm.algebra().shift();
    let parity = sm.n() % 2;
    let mut slicer = Slicer::new(sm);
    let (ju, kz) = order;
    let mut terms: Vec<Vec<Chain<MfBasis>>> = vec![vec![Chain::zero(); kz + 1]; ju + 1];
    terms[0][0] = cycle.chain.clone();
    for t in 1..=ju + kz {
        for j in t.saturating_sub(kz)..=t.min(ju) {
            let k = t - j;
            let mut rhs = Chain::zero();
            if j > 0 {
                rhs.add(&ops.apply(Op::Connes, &terms[j - 1][k]));
            }
            if k > 0 {
                rhs.add(&ops.apply(Op::Bc(&ge), &terms[j][k - 1]));
            }
            let rhs = rhs.neg();
            let Some((_, t0, _)) = rhs.iter().next() else { continue };
            let degree = tensor_degree(sm, t0) - s;
            let max_l = rhs.max_length() + 2;
            terms[j][k] = solve_b(sm, &mut slicer, &rhs, degree, parity, max_l, slice_cap).ok_or((j, k))?;
        }
    }
    let mut out = Chain::zero();
    for (j, row) in terms.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            out.add(&c.times_u(j as i32).times(&Mono::one().with_z(0, k as u16)));
        }
    }
    Ok(out)
}

/// `sum_{k <= order} z^k T^k x / k!` with `T = e(g)/u + E(g)`. Conjugation by
/// `exp(zT)` carries `b + uB` to `b + uB + z b(g)` and kills `nabla_z`.
pub fn central_exponential(sm: &SegalMap<'_>, g: &WPoly, x: &Chain<MfBasis>, order: usize) -> Chain<MfBasis> {
    let ops = sm.ops();
    let ge = sm.central(g);
    let mut out = x.clone();
    let mut cur = x.clone();
    for k in 1..=order {
        let next = ops.apply(Op::Ec(&ge), &cur).times_u(-1).plus(&ops.apply(Op::BigEc(&ge), &cur));
        cur = Chain::zero();
        cur.add_scaled(&next.times_z(0), &Rational::new(1, k as i64));
        out.add(&cur);
    }
    out
}

fn keep(c: &Coef, f: impl Fn(i32, i32) -> bool) -> Coef {
    let mut out = Coef::zero();
    for (mo, v) in c.terms() {
        if f(mo.u, mo.z_degree() as i32) {
            out.add_term(mo.clone(), v.clone());
        }
    }
    out
}

/// Both flatness identities of the pairing extended by one central element
/// `g`, on truncated lifts of the computed cycles.
///
/// Hochschild homology of `A_f` sits in parity `n` and every lifting
/// obstruction is a `b`-cycle of parity `n + 1`, so a truncated lift agrees
/// with an exact one up to the dropped orders. The pairing of `u`- and `z`-free
/// chains is free of `u` and `z`, and the connections lower `u`-order by at
/// most 2 (resp. 1) and change `z`-order by `0, +1` (resp. `0, -1`), so the
/// coefficients accepted by [`FlatnessOrders::exact_u`] and
/// [`FlatnessOrders::exact_z`] do not see the dropped orders. Only those are
/// compared.
pub fn flatness_residuals(
    f: &WPoly,
    ws: &WeightSystem,
    g: &WPoly,
    orders: FlatnessOrders,
    opts: &CorollaryOptions,
) -> Result<FlatnessReport, CorollaryError> {
    let a = MfAlgebra::new(f, ws, opts.parts.clone())?;
    let md = milnor_data(f, ws)?;
    let sm = SegalMap::new(&a);
    let cycles = find_cycles(&sm, &md, opts.search)?;
    let r = retract_for(&a, opts.window)?;
    let ops = sm.ops();
    let ge = sm.central(g);
    let centrals = vec![ge.clone()];
    let mut lifts = Vec::with_capacity(cycles.len());
    for (i, c) in cycles.iter().enumerate() {
        let x = match orders.z_lift {
            ZLift::Exponential => {
                let x = lift_cycle(&sm, g, c, (orders.u_order, 0), opts.search.slice_cap)
                    .map_err(|(j, k)| CorollaryError::LiftFailed { cycle: i, j, k })?;
                central_exponential(&sm, g, &x, orders.z_order)
            }
            ZLift::Solved => lift_cycle(&sm, g, c, (orders.u_order, orders.z_order), opts.search.slice_cap)
                .map_err(|(j, k)| CorollaryError::LiftFailed { cycle: i, j, k })?,
        };
        let mut d = ops.apply(Op::B, &x);
        d.add(&ops.apply(Op::Connes, &x).times_u(1));
        d.add(&ops.apply(Op::Bc(&ge), &x).times_z(0));
        if let Some((mo, _, _)) = d.iter().find(|(mo, _, _)| orders.closed_at(mo.u, mo.z_degree() as i32)) {
            return Err(CorollaryError::LiftFailed { cycle: i, j: mo.u.max(0) as usize, k: mo.z_degree() as usize });
        }
        lifts.push(x);
    }
    let half = Rational::new(1, 2);
    // the summands of nabla_u and nabla_z, kept apart to count live terms
    let u_pieces = |x: &Chain<MfBasis>| -> Vec<Chain<MfBasis>> {
        vec![
            x.d_u(),
            ops.apply(Op::EDelta, x).times_u(-2).scaled(&half),
            ops.apply(Op::BigEDelta, x).times_u(-1).scaled(&half),
            ops.apply(Op::Gamma, x).times_u(-1).scaled(&half).neg(),
            ops.apply(Op::Ec(&ge), x).times_u(-2).times_z(0),
            ops.apply(Op::BigEc(&ge), x).times_u(-1).times_z(0),
        ]
    };
    let z_pieces = |x: &Chain<MfBasis>| -> Vec<Chain<MfBasis>> {
        vec![x.d_z(0), ops.apply(Op::Ec(&ge), x).times_u(-1).neg(), ops.apply(Op::BigEc(&ge), x).neg()]
    };
    let split = |x: &Chain<MfBasis>| -> Vec<(Mono, Chain<MfBasis>)> {
        x.by_mono().iter().map(|(m, l)| (m.clone(), Chain::from_lin(m, l))).collect()
    };
    let split_all = |xs: Vec<Chain<MfBasis>>| xs.iter().map(|x| split(x)).collect::<Vec<_>>();
    let base: Vec<_> = lifts.iter().map(|x| split(x)).collect();
    let nu: Vec<_> = lifts.iter().map(|x| split_all(u_pieces(x))).collect();
    let nz: Vec<_> = lifts.iter().map(|x| split_all(z_pieces(x))).collect();
    debug_assert!(lifts.iter().all(|x| {
        let sum = u_pieces(x).iter().fold(Chain::zero(), |a, p| a.plus(p));
        sum == ops.nabla_u(&centrals, x)
    }));
    // pairs only the monomial components whose product lands where `want` holds
    let pair = |xs: &[(Mono, Chain<MfBasis>)],
                ys: &[(Mono, Chain<MfBasis>)],
                want: &dyn Fn(i32, i32) -> bool|
     -> Result<Coef, CorollaryError> {
        let mut out = Coef::zero();
        for (mx, cx) in xs {
            for (my, cy) in ys {
                if want(mx.u + my.u, (mx.z_degree() + my.z_degree()) as i32) {
                    out = out.plus(&canonical_pairing(&r, cx, cy)?);
                }
            }
        }
        Ok(keep(&out, want))
    };
    let in_u = |a: i32, c: i32| orders.exact_u(a, c);
    let in_z = |a: i32, c: i32| orders.exact_z(a, c);
    let k_for_u = |a: i32, c: i32| orders.exact_u(a - 1, c);
    let k_for_z = |a: i32, c: i32| c >= 1 && orders.exact_z(a, c - 1);
    let k = cycles.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<FlatnessEntry, CorollaryError> {
            let mut live_terms = 0;
            let mut sum = |pieces: &[Vec<(Mono, Chain<MfBasis>)>], left: bool, want: &dyn Fn(i32, i32) -> bool| {
                let mut acc = Coef::zero();
                for p in pieces {
                    let v = if left { pair(p, &base[j], want)? } else { pair(&base[i], p, want)? };
                    live_terms += v.terms().count();
                    acc = acc.plus(&v);
                }
                Ok::<Coef, CorollaryError>(acc)
            };
            let ua = sum(&nu[i], true, &in_u)?;
            let ub = sum(&nu[j], false, &in_u)?;
            let za = sum(&nz[i], true, &in_z)?;
            let zb = sum(&nz[j], false, &in_z)?;
            let ku = pair(&base[i], &base[j], &k_for_u)?.d_u();
            let kz = pair(&base[i], &base[j], &k_for_z)?.d_z(0);
            live_terms += ku.terms().count() + kz.terms().count();
            Ok(FlatnessEntry {
                i,
                j,
                residual_u: keep(&ua.minus(&ub).minus(&ku), in_u),
                residual_z: keep(&za.plus(&zb).minus(&kz), in_z),
                live_terms,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FlatnessReport { orders, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn quadric() -> (WPoly, WeightSystem) {
        (WPoly::monomial(vec![2]), WeightSystem::new(vec![1], 2).unwrap())
    }

    #[test]
    fn quadric_constant_is_minus_one() {
        let (f, ws) = quadric();
        let rep = verify_corollary(&f, &ws, &CorollaryOptions::default()).unwrap();
        assert_eq!(rep.mu, 1);
        assert_eq!(rep.gram_a[0][0].abs(), q(2, 1));
        assert_eq!(rep.gram_f[0][0], q(2, 1));
        assert_eq!(rep.constant, q(-1, 1));
        assert!(rep.matches_conjecture);
        assert!(rep.invariance.iter().any(|c| c.name == "decomposition" && c.constant.is_none()));
    }

    #[test]
    fn conjectured_values() {
        assert_eq!(conjectured_constant(1), q(-1, 1));
        assert_eq!(conjectured_constant(2), q(-1, 1));
        assert_eq!(conjectured_constant(3), q(1, 1));
    }

    #[test]
    fn proportionality_reports_offending_entry() {
        let a = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        let f = vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(3, 1)]];
        assert!(matches!(proportionality(&a, &f), Err(CorollaryError::Proportionality { i: 1, j: 1, .. })));
        let z = vec![vec![q(0, 1)]];
        assert_eq!(proportionality(&z, &z), Err(CorollaryError::DegenerateGram));
    }

    #[test]
    fn symmetry_classes() {
        let s = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        let a = vec![vec![q(0, 1), q(1, 1)], vec![q(-1, 1), q(0, 1)]];
        assert_eq!(Symmetry::of(&s), Symmetry::Symmetric);
        assert_eq!(Symmetry::of(&a), Symmetry::Antisymmetric);
    }

    #[test]
    fn quadric_flatness() {
        let (f, ws) = quadric();
        let rep = flatness_residuals(&f, &ws, &WPoly::var(1, 0), FlatnessOrders { z_lift: ZLift::Solved, ..FlatnessOrders::default() }, &CorollaryOptions::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.entries);
        assert!(rep.nontrivial() > 0);
    }
}
