#![allow(dead_code)]

use dilute_bose::fock::{expectation_interaction_full, FockVector, OccupationState, Rational, TrialConfig};
use dilute_bose::lattice::{sub, Mom};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

/// A cloud mode with one-particle energy and Gibbs ratio q = e^{-beta(e - mu)}.
#[derive(Clone, Copy, Debug)]
pub struct GibbsMode {
    pub k: Mom,
    pub energy: f64,
    pub q: f64,
}

impl GibbsMode {
    pub fn gamma(&self) -> f64 {
        self.q / (1.0 - self.q)
    }
}

/// Interaction table over every difference of the given modes, even in s.
pub fn vhat_table<F: Fn(&Mom) -> f64>(modes: &[Mom], f: F) -> BTreeMap<Mom, f64> {
    let mut out = BTreeMap::new();
    for a in modes {
        for b in modes {
            let s = sub(a, b);
            out.insert(s, f(&s));
        }
    }
    out
}

/// Tr[H rho] for rho = |N0 in the zero mode> x product of geometric Gibbs
/// states on `cloud`, by summing <e_n, H e_n> / <e_n, e_n> over truncated
/// occupation configurations. H = sum e_k a*_k a_k + (1/2) sum V(s) a*a*aa over
/// the zero mode and the cloud.
pub fn gibbs_trace_energy(cloud: &[GibbsMode], n0: u32, vhat: &BTreeMap<Mom, f64>) -> f64 {
    let cut: Vec<u32> = cloud.iter().map(|m| (-40.0 / m.q.ln()).ceil() as u32 + 1).collect();
    let mut modes = vec![[0, 0, 0]];
    modes.extend(cloud.iter().map(|m| m.k));
    let mut total = 0.0;
    let mut occ = vec![0u32; cloud.len()];
    loop {
        let mut weight = 1.0;
        let mut state = OccupationState::new();
        state.set([0, 0, 0], n0);
        let mut kinetic = 0.0;
        for (m, &n) in cloud.iter().zip(&occ) {
            weight *= (1.0 - m.q) * m.q.powi(n as i32);
            state.set(m.k, n);
            kinetic += m.energy * n as f64;
        }
        let v: FockVector<f64> = FockVector::monomial(state.clone());
        let norm: f64 = state.monomial_norm();
        let inter = expectation_interaction_full(&v, vhat, &modes).expect("table covers all transfers") / norm;
        total += weight * (kinetic + inter);
        // odometer over the truncated occupations
        let mut i = 0;
        while i < occ.len() {
            occ[i] += 1;
            if occ[i] <= cut[i] {
                break;
            }
            occ[i] = 0;
            i += 1;
        }
        if i == occ.len() {
            break;
        }
    }
    total
}

pub fn to_float(cfg: &TrialConfig<Rational>) -> TrialConfig<f64> {
    TrialConfig {
        shells: cfg.shells.clone(),
        eta: cfg.eta.iter().map(|(k, v)| (*k, v.to_f64().expect("finite"))).collect(),
        n_alpha: cfg.n_alpha.clone(),
        n0: cfg.n0,
        n_c: cfg.n_c,
        n: cfg.n.to_f64().expect("finite"),
        theta: cfg.theta,
    }
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
