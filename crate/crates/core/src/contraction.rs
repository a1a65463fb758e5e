//! Closed-form combinatorics of the correlation operator: the restriction
//! indicator theta on lists of scattering processes, the norm formula for
//! ||D g||^2, and the kinetic upper-bound terms.

use crate::error::{Error, Result};
use crate::fock::{Scalar, TrialConfig};
use crate::numerics::KahanSum;
use crate::scattering::{norm_representative, EtaField, Potential, ScatteringSolution};
use crate::shells::MomentumShells;
use std::f64::consts::PI;
use crate::lattice::{add, dot, neg, norm2, Mom, ZERO};
use crate::shells::{process_kind, ProcessKind};

/// One scattering process a*_{-r} a*_{r+v+w} a_v a_w.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Process {
    pub r: Mom,
    pub v: Mom,
    pub w: Mom,
}

impl Process {
    pub fn new(r: Mom, v: Mom, w: Mom) -> Self {
        Self { r, v, w }
    }

    pub fn kind(&self) -> ProcessKind {
        process_kind(&self.v, &self.w)
    }

    pub fn low_sum(&self) -> Mom {
        add(&self.v, &self.w)
    }

    /// The two created high momenta {-r, r+v+w}.
    pub fn highs(&self) -> [Mom; 2] {
        [neg(&self.r), add(&self.r, &self.low_sum())]
    }

    pub fn lows(&self) -> [Mom; 2] {
        [self.v, self.w]
    }

    /// Same operator written with r replaced by -r-v-w.
    pub fn exchanged(&self) -> Self {
        Self { r: crate::shells::partner(&self.r, &self.v, &self.w), v: self.v, w: self.w }
    }
}

/// Ordered list of processes with kinds derived from the zero pattern of (v, w).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExcitationList {
    pub items: Vec<Process>,
}

impl ExcitationList {
    pub fn new(items: Vec<Process>) -> Self {
        Self { items }
    }
    pub fn kinds(&self) -> Vec<ProcessKind> {
        self.items.iter().map(|p| p.kind()).collect()
    }
}

/// The sums w_h + w_k allowed by the starred convention: v_k + v'_k when h = k.
fn pair_sums(list: &[Process], h: usize, k: usize) -> Vec<Mom> {
    if h == k {
        vec![list[k].low_sum()]
    } else {
        let mut out = Vec::with_capacity(4);
        for a in list[h].lows() {
            for b in list[k].lows() {
                out.push(add(&a, &b));
            }
        }
        out
    }
}

/// theta of a list of processes: 1 unless, for some i != j,
/// p_i = -p_j + w_h + w_k, or v_i + v'_i = w_j + w_k with w_j != 0.
pub fn theta_indicator(list: &[Process]) -> bool {
    let n = list.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for h in 0..n {
                for k in 0..n {
                    let sums = pair_sums(list, h, k);
                    for pi in list[i].highs() {
                        for pj in list[j].highs() {
                            let target = add(&pi, &pj);
                            if sums.contains(&target) {
                                return false;
                            }
                        }
                    }
                }
            }
            let si = list[i].low_sum();
            for k in 0..n {
                if j == k {
                    if list[j].kind() != ProcessKind::Pair && si == list[j].low_sum() {
                        return false;
                    }
                } else {
                    for wj in list[j].lows() {
                        if wj == ZERO {
                            continue;
                        }
                        for wk in list[k].lows() {
                            if si == add(&wj, &wk) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

fn falling_factorial<S: Scalar>(n: u64, t: u64) -> S {
    let mut out = S::one();
    for i in 0..t {
        out = out * S::from_u64(n - i).expect("small integer");
    }
    out
}

fn pow2_inv<S: Scalar>(e: usize) -> S {
    let two = S::from_u64(2).expect("small integer");
    let mut out = S::one();
    for _ in 0..e {
        out = out / two.clone();
    }
    out
}

/// Labels summed in the norm formula: quadruplets (r, v, v') over ordered
/// pairs, triplets in the (v, 0) form only, and pairs (r, 0, 0).
pub fn formula_labels<S: Scalar>(cfg: &TrialConfig<S>) -> Result<Vec<(Process, S)>> {
    let mut labels = Vec::new();
    let pairs_on = cfg.pairs_enabled();
    for r in &cfg.shells.ph {
        let g = cfg.shells.g_pairs(r)?;
        for (v, w) in &g.quad {
            let s = cfg.eta(r)? + cfg.eta(&add(r, &add(v, w)))?;
            labels.push((Process::new(*r, *v, *w), s.clone() * s * cfg.n_alpha_s(v) * cfg.n_alpha_s(w)));
        }
        if pairs_on {
            for (v, w) in &g.cubic {
                if *w != ZERO {
                    continue;
                }
                let s = cfg.eta(r)? + cfg.eta(&add(r, v))?;
                labels.push((Process::new(*r, *v, ZERO), s.clone() * s * cfg.n_alpha_s(v)));
            }
            let e = cfg.eta(r)?;
            labels.push((Process::new(*r, ZERO, ZERO), e.clone() * e));
        }
    }
    Ok(labels)
}

struct Acc<S> {
    /// by [h][k][pairs]
    buckets: Vec<Vec<Vec<S>>>,
}

fn enumerate<S: Scalar>(
    labels: &[(Process, S)],
    start: usize,
    chosen: &mut Vec<Process>,
    counts: [usize; 3],
    weight: S,
    max_n: usize,
    acc: &mut Acc<S>,
) {
    let [h, k, p] = counts;
    acc.buckets[h][k][p] = acc.buckets[h][k][p].clone() + weight.clone();
    if chosen.len() == max_n {
        return;
    }
    for idx in start..labels.len() {
        let (proc_, w) = &labels[idx];
        chosen.push(*proc_);
        if theta_indicator(chosen) {
            let mut c = counts;
            match proc_.kind() {
                ProcessKind::Quadruplet => c[0] += 1,
                ProcessKind::Triplet => c[1] += 1,
                ProcessKind::Pair => c[2] += 1,
            }
            enumerate(labels, idx + 1, chosen, c, weight.clone() * w.clone(), max_n, acc);
        }
        chosen.pop();
    }
}

/// Sums over label sets S with theta(S) = 1 of the product weights, grouped by
/// (quadruplets, triplets, pairs).
fn grouped_sums<S: Scalar>(labels: &[(Process, S)], max_n: usize) -> Vec<Vec<Vec<S>>> {
    let z = S::zero();
    let mut acc = Acc { buckets: vec![vec![vec![z; max_n + 1]; max_n + 1]; max_n + 1] };
    let mut chosen = Vec::new();
    enumerate(labels, 0, &mut chosen, [0, 0, 0], S::one(), max_n, &mut acc);
    acc.buckets
}

/// ||D_alpha g^0_alpha||^2 from the closed-form sum over (n, h, k).
///
/// Sums over ordered label tuples divided by h! k! (n-h-k)! are evaluated as
/// sums over label sets; theta kills repeated labels.
pub fn norm_formula<S: Scalar>(cfg: &TrialConfig<S>) -> Result<S> {
    let labels = formula_labels(cfg)?;
    let g = grouped_sums(&labels, cfg.n_c);
    let n2 = cfg.n.clone() * cfg.n.clone();
    let mut total = S::zero();
    for (h, gh) in g.iter().enumerate() {
        for (k, ghk) in gh.iter().enumerate() {
            for (p, s) in ghk.iter().enumerate() {
                let n = h + k + p;
                if n > cfg.n_c || s.is_zero() {
                    continue;
                }
                let t = (k + 2 * p) as u64;
                if t > cfg.n0 as u64 {
                    continue;
                }
                let mut term = s.clone() * falling_factorial::<S>(cfg.n0 as u64, t) * pow2_inv::<S>(2 * h + k + p);
                for _ in 0..n {
                    term = term / n2.clone();
                }
                total = total + term;
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KineticTerms<S> {
    pub k_q: S,
    pub k_c: S,
    pub k_p: S,
}

impl<S: Scalar> KineticTerms<S> {
    pub fn total(&self) -> S {
        self.k_q.clone() + self.k_c.clone() + self.k_p.clone()
    }
}

fn int<S: Scalar>(x: i64) -> S {
    S::from_i64(x).expect("small integer")
}

/// Per-unit-norm upper bounds on the kinetic excess from quadruplets, triplets
/// and pairs. Kinetic energies in units of (2 pi)^2.
pub fn kinetic_upper_terms<S: Scalar>(cfg: &TrialConfig<S>) -> Result<KineticTerms<S>> {
    let n2 = cfg.n.clone() * cfg.n.clone();
    let (mut k_q, mut k_c, mut k_p) = (S::zero(), S::zero(), S::zero());
    let pairs_on = cfg.pairs_enabled();
    for r in &cfg.shells.ph {
        let g = cfg.shells.g_pairs(r)?;
        let er = cfg.eta(r)?;
        for (v, w) in &g.quad {
            let s = add(v, w);
            let c = norm2(r) + dot(r, &s) + dot(v, w);
            k_q = k_q
                + int::<S>(c) * er.clone() * (er.clone() + cfg.eta(&add(r, &s))?) * cfg.n_alpha_s(v) * cfg.n_alpha_s(w);
        }
        if pairs_on {
            for (v, w) in &g.cubic {
                if *w != ZERO {
                    continue;
                }
                let c = norm2(r) + dot(r, v);
                k_c = k_c + int::<S>(c) * er.clone() * (er.clone() + cfg.eta(&add(r, v))?) * cfg.n_alpha_s(v);
            }
            k_p = k_p + int::<S>(norm2(r)) * er.clone() * er.clone();
        }
    }
    let n0 = S::from_u64(cfg.n0 as u64).expect("small integer");
    Ok(KineticTerms {
        k_q: k_q / n2.clone(),
        k_c: int::<S>(2) * n0.clone() * k_c / n2.clone(),
        k_p: n0.clone() * n0 * k_p / n2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingInteraction {
    /// 1/2 V_N-hat(0) + (1/N) sum V_N-hat(r) eta_r + (1/2N^2) sum (V_N-hat * eta)_r eta_r over P_H.
    pub bracket: f64,
    /// bracket (2N^2 - N_0^2)
    pub value: f64,
    /// (1/N^2) sum over P_H of r^2 eta_r^2, the pair kinetic term with the same prefactor.
    pub kinetic_pair: f64,
    /// 4 pi a N^{kappa - 1}
    pub target: f64,
}

impl LeadingInteraction {
    /// (bracket + kinetic_pair) / (4 pi a N^{kappa-1}); tends to 1.
    pub fn combined_ratio(&self) -> f64 {
        (self.bracket + self.kinetic_pair) / self.target
    }
}

/// The leading interaction bracket for physical shells. The convolution
/// V_N-hat * eta runs over the full dual lattice and is evaluated in position
/// space as -N (V_N (1 - f))^; the P_H sums run up to the cutoff of `eta`.
pub fn leading_interaction(
    sol: &ScatteringSolution,
    pot: &Potential,
    eta: &EtaField,
    shells: &MomentumShells,
    n0: f64,
) -> Result<LeadingInteraction> {
    if shells.params.is_none() {
        return Err(Error::Config("leading_interaction needs physical shells".into()));
    }
    let n = sol.n;
    let x = sol.scale();
    let vn = n.powf(sol.kappa - 1.0);
    let (mut lin, mut quad, mut kin) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for (m, (&e, &c)) in eta.values.iter().zip(&eta.counts).enumerate() {
        if c == 0 {
            continue;
        }
        let Some(rep) = norm_representative(m as i64) else { continue };
        if !shells.in_ph(&rep) {
            continue;
        }
        let p = 2.0 * PI * (m as f64).sqrt();
        let w = c as f64;
        lin.add(w * vn * pot.fourier(p / x, 12) * e);
        quad.add(w * (-n * sol.vw_hat(p)) * e);
        kin.add(w * p * p * e * e);
    }
    let bracket = 0.5 * vn * pot.fourier(0.0, 12) + lin.value() / n + quad.value() / (2.0 * n * n);
    Ok(LeadingInteraction {
        bracket,
        value: bracket * (2.0 * n * n - n0 * n0),
        kinetic_pair: kin.value() / (n * n),
        target: 4.0 * PI * sol.a * vn,
    })
}
