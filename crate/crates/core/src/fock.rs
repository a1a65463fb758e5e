//! Brute-force second quantization on small mode sets.
//!
//! Vectors are stored as coefficients against the unnormalized monomials
//! prod_p (a*_p)^{n_p} |vac>. In that basis a*_p shifts n_p up with factor 1,
//! a_p shifts it down with factor n_p, and <e_n, e_m> = delta_{nm} prod n_p!.
//! All amplitudes stay real, so exact rational arithmetic works throughout.

use crate::contraction::{theta_indicator, Process};
use crate::error::{Error, Result};
use crate::lattice::{add, neg, norm2, sub, Mom, ZERO};
use crate::shells::MomentumShells;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Debug;

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync {}
impl<T: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync> Scalar for T {}

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub const TERM_LIMIT: usize = 10_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationState {
    occ: BTreeMap<Mom, u32>,
}

impl OccupationState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Mom, u32)>>(it: I) -> Self {
        let mut s = Self::new();
        for (k, n) in it {
            s.set(k, s.get(&k) + n);
        }
        s
    }

    pub fn get(&self, k: &Mom) -> u32 {
        self.occ.get(k).copied().unwrap_or(0)
    }

    pub fn set(&mut self, k: Mom, n: u32) {
        if n == 0 {
            self.occ.remove(&k);
        } else {
            self.occ.insert(k, n);
        }
    }

    pub fn total(&self) -> u64 {
        self.occ.values().map(|&n| n as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mom, &u32)> {
        self.occ.iter()
    }

    /// <e_n, e_n> = prod n_p!.
    pub fn monomial_norm<S: Scalar>(&self) -> S {
        let mut out = S::one();
        for &n in self.occ.values() {
            for i in 2..=n {
                out = out * S::from_u32(i).expect("small integer");
            }
        }
        out
    }

    fn raised(&self, k: Mom) -> Self {
        let mut s = self.clone();
        s.set(k, self.get(&k) + 1);
        s
    }

    /// (n_k, state with n_k - 1), or None on an empty mode.
    fn lowered(&self, k: Mom) -> Option<(u32, Self)> {
        let n = self.get(&k);
        if n == 0 {
            return None;
        }
        let mut s = self.clone();
        s.set(k, n - 1);
        Some((n, s))
    }

    /// a*_{c1} a*_{c2} a_{a1} a_{a2} on the monomial: resulting monomial and factor.
    pub fn quartic(&self, c1: Mom, c2: Mom, a1: Mom, a2: Mom) -> Option<(u64, Self)> {
        let (f2, s) = self.lowered(a2)?;
        let (f1, s) = s.lowered(a1)?;
        Some((f1 as u64 * f2 as u64, s.raised(c2).raised(c1)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    terms: BTreeMap<OccupationState, S>,
}

impl<S: Scalar> Default for FockVector<S> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> FockVector<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The monomial e_n with coefficient 1 (norm^2 = prod n!).
    pub fn monomial(state: OccupationState) -> Self {
        let mut v = Self::zero();
        v.add_term(state, S::one());
        v
    }

    pub fn add_term(&mut self, state: OccupationState, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&state) {
            Some(x) => {
                *x = x.clone() + c;
                if x.is_zero() {
                    self.terms.remove(&state);
                }
            }
            None => {
                self.terms.insert(state, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationState, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, state: &OccupationState) -> S {
        self.terms.get(state).cloned().unwrap_or_else(S::zero)
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x.clone() * c.clone());
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.accumulate(other, &S::one());
        out
    }

    pub fn accumulate(&mut self, other: &Self, c: &S) {
        for (k, x) in &other.terms {
            self.add_term(k.clone(), x.clone() * c.clone());
        }
    }

    pub fn apply_creation(&self, k: Mom) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            out.add_term(s.raised(k), c.clone());
        }
        out
    }

    pub fn apply_annihilation(&self, k: Mom) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            if let Some((n, t)) = s.lowered(k) {
                out.add_term(t, c.clone() * S::from_u32(n).expect("small integer"));
            }
        }
        out
    }

    pub fn apply_quartic(&self, c1: Mom, c2: Mom, a1: Mom, a2: Mom) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            if let Some((f, t)) = s.quartic(c1, c2, a1, a2) {
                out.add_term(t, c.clone() * S::from_u64(f).expect("small integer"));
            }
        }
        out
    }

    pub fn apply_process(&self, p: &Process) -> Self {
        let [c1, c2] = p.highs();
        self.apply_quartic(c1, c2, p.v, p.w)
    }

    pub fn inner(&self, other: &Self) -> S {
        let mut out = S::zero();
        for (s, c) in &self.terms {
            if let Some(d) = other.terms.get(s) {
                out = out + c.clone() * d.clone() * s.monomial_norm();
            }
        }
        out
    }

    pub fn norm_sq(&self) -> S {
        self.inner(self)
    }

    /// Common particle number of all terms, or None for a mixed vector.
    pub fn particle_number(&self) -> Option<u64> {
        let mut it = self.terms.keys().map(|s| s.total());
        let first = it.next()?;
        it.all(|n| n == first).then_some(first)
    }

    /// Applies sum_p eps(p) a*_p a_p for a diagonal one-body weight.
    pub fn apply_diagonal<F: Fn(&Mom) -> S>(&self, eps: F) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            let mut w = S::zero();
            for (k, &n) in s.iter() {
                w = w + eps(k) * S::from_u32(n).expect("small integer");
            }
            out.add_term(s.clone(), c.clone() * w);
        }
        out
    }
}

/// Which reading of chi(N_0 = N_0) the literal cut-off uses: the operator
/// N_0 evaluated on the running state, or the reference value (always 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondensateCheck {
    Running,
    Reference,
}

/// Gate deciding which processes D applies to a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaRule {
    /// Product of indicator factors read on the operand occupations.
    Literal(CondensateCheck),
    /// theta of the accumulated process list, so every term of D^n g carries an
    /// admissible list.
    History,
}

#[derive(Clone, Debug)]
pub struct TrialConfig<S> {
    pub shells: MomentumShells,
    /// eta on P_H, even under p -> -p.
    pub eta: BTreeMap<Mom, S>,
    /// Occupations of g^0 on P_A. The condensate occupation is `n0`.
    pub n_alpha: BTreeMap<Mom, u32>,
    pub n0: u32,
    pub n_c: usize,
    /// Particle count in the 1/(2N) prefactor.
    pub n: S,
    pub theta: ThetaRule,
}

impl<S: Scalar> TrialConfig<S> {
    pub fn validate(&self) -> Result<()> {
        for k in self.n_alpha.keys() {
            if !self.shells.in_pa(k) {
                return Err(Error::Domain(format!("n_alpha has mode {k:?} outside P_A")));
            }
        }
        for r in &self.shells.ph {
            let e = self.eta(r)?;
            if self.eta(&neg(r))? != e {
                return Err(Error::Config(format!("eta is not even at {r:?}")));
            }
        }
        if !(self.n > S::zero()) {
            return Err(Error::Domain("N must be positive".into()));
        }
        Ok(())
    }

    /// Pair and triplet excitations need N_0 >= 2 n_c; otherwise only
    /// quadruplets are kept.
    pub fn pairs_enabled(&self) -> bool {
        self.n0 as usize >= 2 * self.n_c
    }

    pub fn eta(&self, r: &Mom) -> Result<S> {
        self.eta.get(r).cloned().ok_or_else(|| Error::Config(format!("eta missing at {r:?}")))
    }

    /// Reference occupation n^alpha_p, with n^alpha_0 = N_0.
    pub fn reference(&self, p: &Mom) -> u32 {
        if *p == ZERO {
            self.n0
        } else {
            self.n_alpha.get(p).copied().unwrap_or(0)
        }
    }

    pub fn n_alpha_s(&self, p: &Mom) -> S {
        S::from_u32(self.reference(p)).expect("small integer")
    }

    pub fn g0_state(&self) -> OccupationState {
        let mut s = OccupationState::from_pairs(self.n_alpha.iter().map(|(k, n)| (*k, *n)));
        s.set(ZERO, self.n0);
        s
    }

    /// All processes D can apply, in a fixed order.
    pub fn processes(&self) -> Result<Vec<Process>> {
        let mut out = Vec::new();
        for r in &self.shells.ph {
            let g = self.shells.g_pairs(r)?;
            let g = if self.pairs_enabled() { g } else { g.quad_only() };
            for (v, w) in g.iter() {
                if !self.pairs_enabled() && v == ZERO && w == ZERO {
                    continue;
                }
                out.push(Process::new(*r, v, w));
            }
        }
        Ok(out)
    }

    pub fn with_theta(&self, theta: ThetaRule) -> Self {
        let mut c = self.clone();
        c.theta = theta;
        c
    }
}

fn occupied_high<'a>(state: &'a OccupationState, shells: &'a MomentumShells) -> impl Iterator<Item = Mom> + 'a {
    state.iter().filter(|(k, &n)| n > 0 && shells.in_ph(k)).map(|(k, _)| *k)
}

fn depleted<S: Scalar>(state: &OccupationState, cfg: &TrialConfig<S>, with_zero: bool) -> Vec<Mom> {
    let mut out = Vec::new();
    if with_zero && state.get(&ZERO) < cfg.n0 {
        out.push(ZERO);
    }
    for (k, &n) in &cfg.n_alpha {
        if state.get(k) < n {
            out.push(*k);
        }
    }
    out
}

/// Literal evaluation of the cut-off Theta_1 Theta_2 for process p on `state`.
pub fn theta_operator<S: Scalar>(state: &OccupationState, p: &Process, cfg: &TrialConfig<S>, check: CondensateCheck) -> bool {
    let sh = &cfg.shells;
    let highs: Vec<Mom> = occupied_high(state, sh).collect();
    let dep0 = depleted(state, cfg, true);
    let lows = p.lows();
    let nz: Vec<Mom> = lows.iter().copied().filter(|w| *w != ZERO).collect();
    // Theta_1a
    for s in &highs {
        for u in &dep0 {
            let base = sub(u, s);
            if nz.iter().any(|w| state.get(&add(&base, w)) > 0) {
                return false;
            }
        }
    }
    // Theta_1b
    for u1 in &dep0 {
        for u2 in &dep0 {
            if u1 == u2 {
                continue;
            }
            for hp in p.highs() {
                let base = sub(u1, &hp);
                let mut total = state.get(&add(&base, u2)) as u64;
                for w in &lows {
                    total += state.get(&add(&base, w)) as u64;
                }
                if total > 0 {
                    return false;
                }
            }
        }
    }
    let pair = p.v == ZERO && p.w == ZERO;
    // Theta_2a
    if !pair {
        let sum = p.low_sum();
        if highs.iter().any(|s| state.get(&sub(&sum, s)) > 0) {
            return false;
        }
    }
    // Theta_2b
    let cond_full = match check {
        CondensateCheck::Running => state.get(&ZERO) == cfg.n0,
        CondensateCheck::Reference => true,
    };
    if lows.contains(&ZERO) && cond_full {
        let dep = depleted(state, cfg, false);
        for s in &highs {
            if dep.iter().any(|u| state.get(&sub(u, s)) > 0) {
                return false;
            }
        }
    }
    // Theta_2c
    if pair {
        let cond_near = match check {
            CondensateCheck::Running => state.get(&ZERO) + 1 >= cfg.n0,
            CondensateCheck::Reference => true,
        };
        if cond_near && sh.ph.iter().any(|s| state.get(s) + state.get(&neg(s)) > 2) {
            return false;
        }
    }
    true
}

/// D acting on a plain vector with the literal cut-off.
pub fn apply_d<S: Scalar>(v: &FockVector<S>, cfg: &TrialConfig<S>) -> Result<FockVector<S>> {
    let check = match cfg.theta {
        ThetaRule::Literal(c) => c,
        ThetaRule::History => {
            return Err(Error::Config("the list-gated D acts on tagged vectors; use build_curly_d".into()))
        }
    };
    let procs = cfg.processes()?;
    let two_n = S::from_u32(2).expect("small integer") * cfg.n.clone();
    let mut out = FockVector::zero();
    for (s, c) in v.terms() {
        for p in &procs {
            if !theta_operator(s, p, cfg, check) {
                continue;
            }
            let [c1, c2] = p.highs();
            if let Some((f, t)) = s.quartic(c1, c2, p.v, p.w) {
                let coef = c.clone() * cfg.eta(&p.r)? * S::from_u64(f).expect("small integer") / two_n.clone();
                out.add_term(t, coef);
            }
        }
        if out.len() > TERM_LIMIT {
            return Err(Error::Resource(format!("D produced more than {TERM_LIMIT} terms")));
        }
    }
    Ok(out)
}

/// Terms keyed by (sorted list of applied process indices, occupations).
type Tagged<S> = BTreeMap<(Vec<usize>, OccupationState), S>;

#[derive(Clone, Debug)]
pub struct CurlyD<S> {
    /// sum_{n <= n_c} D^n g / n!
    pub vector: FockVector<S>,
    /// D^n g / n! for n = 0..=n_c.
    pub orders: Vec<FockVector<S>>,
    pub order_norms: Vec<S>,
    /// Terms of D^n g whose process list fails theta.
    pub violations: usize,
    pub processes: Vec<Process>,
}

fn d_step<S: Scalar>(tagged: &Tagged<S>, procs: &[Process], cfg: &TrialConfig<S>) -> Result<Tagged<S>> {
    let two_n = S::from_u32(2).expect("small integer") * cfg.n.clone();
    let mut out: Tagged<S> = BTreeMap::new();
    let mut scratch = Vec::new();
    for ((list, state), c) in tagged {
        for (idx, p) in procs.iter().enumerate() {
            let gate = match cfg.theta {
                ThetaRule::Literal(check) => theta_operator(state, p, cfg, check),
                ThetaRule::History => {
                    if list.contains(&idx) {
                        false
                    } else {
                        scratch.clear();
                        scratch.extend(list.iter().map(|&i| procs[i]));
                        scratch.push(*p);
                        theta_indicator(&scratch)
                    }
                }
            };
            if !gate {
                continue;
            }
            let [c1, c2] = p.highs();
            let Some((f, t)) = state.quartic(c1, c2, p.v, p.w) else { continue };
            let coef = c.clone() * cfg.eta(&p.r)? * S::from_u64(f).expect("small integer") / two_n.clone();
            if coef.is_zero() {
                continue;
            }
            let mut l = list.clone();
            let pos = l.partition_point(|&i| i <= idx);
            l.insert(pos, idx);
            let e = out.entry((l, t)).or_insert_with(S::zero);
            *e = e.clone() + coef;
        }
        if out.len() > TERM_LIMIT {
            return Err(Error::Resource(format!("D^n g exceeded {TERM_LIMIT} terms")));
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Builds sum_{n <= n_c} D^n g^0 / n! from the monomial g^0 of `cfg`.
///
/// The result is in units where g^0 is the monomial e_{n^alpha}; divide norms
/// by prod n! to normalize g^0.
pub fn build_curly_d<S: Scalar>(cfg: &TrialConfig<S>) -> Result<CurlyD<S>> {
    cfg.validate()?;
    let procs = cfg.processes()?;
    let mut tagged: Tagged<S> = BTreeMap::new();
    tagged.insert((Vec::new(), cfg.g0_state()), S::one());
    let g0_norm: S = cfg.g0_state().monomial_norm();
    let mut vector = FockVector::zero();
    let mut orders = Vec::new();
    let mut order_norms = Vec::new();
    let mut violations = 0;
    let mut fact = S::one();
    for n in 0..=cfg.n_c {
        if n > 0 {
            tagged = d_step(&tagged, &procs, cfg)?;
            fact = fact * S::from_usize(n).expect("small integer");
        }
        let mut order = FockVector::zero();
        let mut list = Vec::new();
        for ((l, s), c) in &tagged {
            list.clear();
            list.extend(l.iter().map(|&i| procs[i]));
            let distinct = l.windows(2).all(|w| w[0] != w[1]);
            if !distinct || !theta_indicator(&list) {
                violations += 1;
            }
            order.add_term(s.clone(), c.clone() / fact.clone());
        }
        order_norms.push(order.norm_sq() / g0_norm.clone());
        vector.accumulate(&order, &S::one());
        orders.push(order);
    }
    Ok(CurlyD { vector, orders, order_norms, violations, processes: procs })
}

/// ||D g^0||^2 for normalized g^0.
pub fn curly_d_norm<S: Scalar>(cfg: &TrialConfig<S>) -> Result<S> {
    let d = build_curly_d(cfg)?;
    Ok(d.vector.norm_sq() / cfg.g0_state().monomial_norm())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KineticSplit<S> {
    pub total: S,
    pub high: S,
    pub low: S,
}

/// <v, K v> split into P_H and P_G contributions; energies |k|^2 in units of (2 pi)^2.
pub fn expectation_kinetic<S: Scalar>(v: &FockVector<S>, shells: &MomentumShells) -> KineticSplit<S> {
    let (mut total, mut high, mut low) = (S::zero(), S::zero(), S::zero());
    for (s, c) in v.terms() {
        let w = c.clone() * c.clone() * s.monomial_norm();
        for (k, &n) in s.iter() {
            let e = w.clone() * S::from_i64(norm2(k) * n as i64).expect("small integer");
            total = total + e.clone();
            if shells.in_ph(k) {
                high = high + e;
            } else if shells.in_pg(k) {
                low = low + e;
            }
        }
    }
    KineticSplit { total, high, low }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InteractionBlocks<S> {
    pub v0: S,
    /// <V2a + h.c.>
    pub v2a: S,
    /// <V2b + h.c.>
    pub v2b: S,
    pub v4: S,
}

impl<S: Scalar> InteractionBlocks<S> {
    pub fn total(&self) -> S {
        self.v0.clone() + self.v2a.clone() + self.v2b.clone() + self.v4.clone()
    }
}

fn vhat_at<S: Scalar>(table: &BTreeMap<Mom, S>, s: &Mom) -> Result<S> {
    table.get(s).cloned().ok_or_else(|| Error::Config(format!("V_hat_N missing at transfer {s:?}")))
}

/// (1/2) sum V(s) <v, a*_{p+s} a*_q a_{q+s} a_p v> over p, q, s with
/// p in A, q in B, q+s in C, p+s in D; `weight` gives V for (s, p, q).
fn quartic_block<S: Scalar, W: Fn(&Mom, &Mom, &Mom) -> Result<S>>(
    v: &FockVector<S>,
    sets: [&[Mom]; 4],
    weight: W,
) -> Result<S> {
    let [a, b, c, d] = sets;
    let mut out = S::zero();
    for p in a {
        for ps in d {
            let s = sub(ps, p);
            for q in b {
                let qs = add(q, &s);
                if !c.contains(&qs) {
                    continue;
                }
                let w = weight(&s, p, q)?;
                if w.is_zero() {
                    continue;
                }
                let x = v.inner(&v.apply_quartic(*ps, *q, qs, *p));
                out = out + w * x;
            }
        }
    }
    Ok(out / S::from_u32(2).expect("small integer"))
}

/// Exact expectations of the interaction split by the number of P_H labels.
pub fn expectation_interaction<S: Scalar>(
    v: &FockVector<S>,
    vhat: &BTreeMap<Mom, S>,
    shells: &MomentumShells,
) -> Result<InteractionBlocks<S>> {
    let mut a0 = vec![ZERO];
    a0.extend(shells.pa.iter().copied());
    let h = shells.ph.clone();
    let two = S::from_u32(2).expect("small integer");
    let plain = |s: &Mom, _: &Mom, _: &Mom| vhat_at(vhat, s);
    let v0 = quartic_block(v, [&a0, &a0, &a0, &a0], plain)?;
    let v2a = two.clone() * quartic_block(v, [&a0, &h, &a0, &h], plain)?;
    let v2b = two
        * quartic_block(v, [&a0, &a0, &h, &h], |s, p, q| Ok(vhat_at(vhat, s)? + vhat_at(vhat, &sub(p, q))?))?;
    let v4 = quartic_block(v, [&h, &h, &h, &h], plain)?;
    Ok(InteractionBlocks { v0, v2a, v2b, v4 })
}

/// <v, V v> with all four labels ranging over `modes`.
pub fn expectation_interaction_full<S: Scalar>(v: &FockVector<S>, vhat: &BTreeMap<Mom, S>, modes: &[Mom]) -> Result<S> {
    quartic_block(v, [modes, modes, modes, modes], |s, _, _| vhat_at(vhat, s))
}

/// Random toy instance: a few P_A modes along the axes, P_H made of +-pairs
/// reachable from them, rational eta and small occupations.
pub fn random_toy(seed: u64, theta: ThetaRule) -> Result<TrialConfig<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low_pool: [Mom; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [1, 1, 0], [-1, 0, 1]];
    let bases: [Mom; 5] = [[3, 0, 0], [0, 3, 0], [2, 2, 1], [0, 0, 3], [3, 1, 0]];
    let n_pairs = rng.random_range(1..=3usize);
    let n_pa = rng.random_range(0..=(7 - 2 * n_pairs).min(3));
    let mut pa: Vec<Mom> = Vec::new();
    while pa.len() < n_pa {
        let k = low_pool[rng.random_range(0..low_pool.len())];
        if !pa.contains(&k) {
            pa.push(k);
        }
    }
    let mut full: Vec<Mom> = Vec::new();
    let mut tries = 0;
    while full.len() < 2 * n_pairs && tries < 100 {
        tries += 1;
        let c = if !full.is_empty() && !pa.is_empty() && rng.random_bool(0.7) {
            let b = full[rng.random_range(0..full.len())];
            let mut shift = pa[rng.random_range(0..pa.len())];
            if pa.len() > 1 && rng.random_bool(0.75) {
                shift = add(&shift, &pa[rng.random_range(0..pa.len())]);
            }
            add(&b, &shift)
        } else {
            bases[rng.random_range(0..bases.len())]
        };
        if norm2(&c) > 2 && !full.contains(&c) {
            full.push(c);
            full.push(neg(&c));
        }
    }
    full.sort();
    let shells = MomentumShells::toy(&[], &pa, &full)?;
    let mut eta = BTreeMap::new();
    for k in &full {
        if eta.contains_key(k) {
            continue;
        }
        let num = rng.random_range(-6..=6i64);
        let den = rng.random_range(1..=4i64);
        eta.insert(*k, rational(num, den));
        eta.insert(neg(k), rational(num, den));
    }
    let mut n_alpha = BTreeMap::new();
    let mut left = 6u32;
    for k in &pa {
        let n = rng.random_range(0..=2u32).min(left);
        left -= n;
        if n > 0 {
            n_alpha.insert(*k, n);
        }
    }
    let n0 = rng.random_range(0..=8u32);
    let n_c = rng.random_range(0..=3usize);
    let n = rational(rng.random_range(1..=8), 1);
    Ok(TrialConfig { shells, eta, n_alpha, n0, n_c, n, theta })
}

/// Symmetric random rational V_hat over every difference of modes in `modes`.
pub fn random_vhat(seed: u64, modes: &[Mom]) -> BTreeMap<Mom, Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = BTreeMap::new();
    for a in modes {
        for b in modes {
            let s = sub(a, b);
            if out.contains_key(&s) {
                continue;
            }
            let v = rational(rng.random_range(-5..=9i64), rng.random_range(1..=3i64));
            out.insert(s, v.clone());
            out.insert(neg(&s), v);
        }
    }
    out
}

/// Every mode touched by `cfg`: the condensate, P_A and P_H.
pub fn toy_modes<S: Scalar>(cfg: &TrialConfig<S>) -> Vec<Mom> {
    let mut m = vec![ZERO];
    m.extend(cfg.shells.pa.iter().copied());
    m.extend(cfg.shells.ph.iter().copied());
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_pair(n_c: usize) -> TrialConfig<Rational> {
        let r = [3, 0, 0];
        let shells = MomentumShells::toy(&[], &[], &[r, neg(&r)]).unwrap();
        let eta = BTreeMap::from([(r, rational(1, 1)), (neg(&r), rational(1, 1))]);
        TrialConfig { shells, eta, n_alpha: BTreeMap::new(), n0: 4, n_c, n: rational(4, 1), theta: ThetaRule::History }
    }

    #[test]
    fn number_operator_on_monomial() {
        let k = [1, 0, 0];
        let v: FockVector<Rational> = FockVector::monomial(OccupationState::from_pairs([(k, 3)]));
        let w = v.apply_creation(k).apply_annihilation(k);
        assert_eq!(w, v.scaled(&rational(4, 1)));
        let w = v.apply_annihilation(k).apply_creation(k);
        assert_eq!(w, v.scaled(&rational(3, 1)));
        assert!(v.apply_annihilation([0, 1, 0]).is_empty());
    }

    #[test]
    fn condensate_falling_factorial() {
        let v: FockVector<Rational> = FockVector::monomial(OccupationState::from_pairs([(ZERO, 5)]));
        let mut w = v.clone();
        for _ in 0..3 {
            w = w.apply_annihilation(ZERO);
        }
        for _ in 0..3 {
            w = w.apply_creation(ZERO);
        }
        assert_eq!(w, v.scaled(&rational(60, 1)));
    }

    #[test]
    fn single_pair_by_hand() {
        // D g = (1/N) eta a*_{-r} a*_r a_0 a_0 g; second order killed by theta.
        let cfg = single_pair(2);
        let d = build_curly_d(&cfg).unwrap();
        assert_eq!(d.order_norms[1], rational(4 * 3, 16));
        assert_eq!(d.order_norms[2], rational(0, 1));
        assert_eq!(curly_d_norm(&cfg).unwrap(), rational(1, 1) + rational(12, 16));
    }

    #[test]
    fn literal_theta_is_one_without_excitations() {
        let cfg = single_pair(1);
        let g = cfg.g0_state();
        for p in cfg.processes().unwrap() {
            assert!(theta_operator(&g, &p, &cfg, CondensateCheck::Running));
        }
    }

    #[test]
    fn missing_vhat_is_config_error() {
        let cfg = single_pair(1);
        let d = build_curly_d(&cfg).unwrap();
        let err = expectation_interaction(&d.vector, &BTreeMap::new(), &cfg.shells).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
