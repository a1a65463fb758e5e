//! Momentum partition P_0, P_G, P_A, P_H and the excitation index sets G_r.
//!
//! Momenta are integer triples k standing for p = 2 pi k. Physical shells come
//! from the thresholds in beta and N; toy shells are given explicitly.

use crate::error::{domain, Result};
use crate::lattice::{add, neg, norm2, vectors_in_shell, Mom, ZERO};
use std::collections::BTreeSet;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellParams {
    pub beta: f64,
    pub n: f64,
    pub kappa: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub eps: f64,
}

impl ShellParams {
    /// |p| <= beta^{-(1+delta2)/2} bounds P_G and P_A from above.
    pub fn pg_radius(&self) -> f64 {
        self.beta.powf(-0.5 * (1.0 + self.delta2))
    }
    pub fn pa_inner_radius(&self) -> f64 {
        self.beta.powf(-0.5 * (1.0 - self.delta1))
    }
    pub fn ph_radius(&self) -> f64 {
        self.n.powf(1.0 - self.kappa - self.eps)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum HighSet {
    /// Norm window in units of (2 pi)^2: n_lo <= |k|^2 <= n_hi.
    Window { n_lo: i64, n_hi: i64 },
    Explicit(BTreeSet<Mom>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentumShells {
    pub params: Option<ShellParams>,
    pub pg: Vec<Mom>,
    pub pa: Vec<Mom>,
    /// Enumerated P_H. In physical mode this is truncated at the requested
    /// outer radius; membership tests use the untruncated window.
    pub ph: Vec<Mom>,
    pg_set: BTreeSet<Mom>,
    pa_set: BTreeSet<Mom>,
    high: HighSet,
}

fn ceil_norm2(radius: f64) -> i64 {
    // smallest n with 2 pi sqrt(n) >= radius
    let mut n = ((radius / (2.0 * PI)).powi(2)).ceil() as i64;
    while n > 0 && 2.0 * PI * ((n - 1) as f64).sqrt() >= radius {
        n -= 1;
    }
    while 2.0 * PI * (n as f64).sqrt() < radius {
        n += 1;
    }
    n
}

fn floor_norm2(radius: f64) -> i64 {
    let mut n = ((radius / (2.0 * PI)).powi(2)).floor() as i64;
    while 2.0 * PI * (n as f64).sqrt() > radius {
        n -= 1;
    }
    while 2.0 * PI * ((n + 1) as f64).sqrt() <= radius {
        n += 1;
    }
    n
}

impl MomentumShells {
    /// Physical shells; P_H is enumerated up to |p| <= ph_outer.
    pub fn build(params: ShellParams, ph_outer: f64) -> Result<Self> {
        let ShellParams { beta, n, kappa, delta1, delta2, eps } = params;
        if !(beta > 0.0) || !(n >= 1.0) {
            return domain(format!("need beta > 0 and N >= 1, got beta={beta}, N={n}"));
        }
        if !(delta1 > 0.0 && delta2 > 0.0 && eps > 0.0) {
            return domain("delta1, delta2, eps must be positive");
        }
        let c = 3.0 * kappa - 2.0 + 3.0 * eps + delta2;
        if !(c < 0.0) {
            return domain(format!("3 kappa - 2 + 3 eps + delta2 = {c} is not negative"));
        }
        let n_g = floor_norm2(params.pg_radius());
        let n_a = ceil_norm2(params.pa_inner_radius()).max(1);
        let n_h = ceil_norm2(params.ph_radius()).max(1);
        if n_h <= n_g {
            return domain(format!(
                "P_G and P_H overlap: beta^(-(1+delta2)/2) = {} >= N^(1-kappa-eps) = {}",
                params.pg_radius(),
                params.ph_radius()
            ));
        }
        let pg = vectors_in_shell(1, n_g);
        let pa = if n_a <= n_g { vectors_in_shell(n_a, n_g) } else { Vec::new() };
        let n_out = floor_norm2(ph_outer);
        let ph = if n_out >= n_h { vectors_in_shell(n_h, n_out) } else { Vec::new() };
        Ok(Self {
            params: Some(params),
            pg_set: pg.iter().copied().collect(),
            pa_set: pa.iter().copied().collect(),
            pg,
            pa,
            ph,
            high: HighSet::Window { n_lo: n_h, n_hi: i64::MAX },
        })
    }

    /// Hand-picked shells. P_G defaults to P_A when empty.
    pub fn toy(pg: &[Mom], pa: &[Mom], ph: &[Mom]) -> Result<Self> {
        let pa_set: BTreeSet<Mom> = pa.iter().copied().collect();
        let mut pg_set: BTreeSet<Mom> = pg.iter().copied().collect();
        if pg_set.is_empty() {
            pg_set = pa_set.clone();
        }
        let ph_set: BTreeSet<Mom> = ph.iter().copied().collect();
        if pg_set.contains(&ZERO) || ph_set.contains(&ZERO) {
            return domain("the zero mode is reserved for P_0");
        }
        if !pa_set.is_subset(&pg_set) {
            return domain("P_A must be contained in P_G");
        }
        if let Some(k) = pg_set.intersection(&ph_set).next() {
            return domain(format!("P_G and P_H share {k:?}"));
        }
        if let Some(k) = ph_set.iter().find(|k| !ph_set.contains(&neg(k))) {
            return domain(format!("P_H must be closed under p -> -p, missing -{k:?}"));
        }
        Ok(Self {
            params: None,
            pg: pg_set.iter().copied().collect(),
            pa: pa_set.iter().copied().collect(),
            ph: ph_set.iter().copied().collect(),
            pg_set,
            pa_set,
            high: HighSet::Explicit(ph_set),
        })
    }

    pub fn in_pg(&self, k: &Mom) -> bool {
        self.pg_set.contains(k)
    }
    pub fn in_pa(&self, k: &Mom) -> bool {
        self.pa_set.contains(k)
    }
    pub fn in_pa0(&self, k: &Mom) -> bool {
        *k == ZERO || self.pa_set.contains(k)
    }
    pub fn in_ph(&self, k: &Mom) -> bool {
        match &self.high {
            HighSet::Window { n_lo, n_hi } => {
                let n = norm2(k);
                n >= *n_lo && n <= *n_hi
            }
            HighSet::Explicit(s) => s.contains(k),
        }
    }

    /// Excitation index set G_r for r in P_H.
    pub fn g_pairs(&self, r: &Mom) -> Result<GrSets> {
        if !self.in_ph(r) {
            return domain(format!("{r:?} is not in P_H"));
        }
        let mut quad = Vec::new();
        let mut cubic = Vec::new();
        for v in &self.pa {
            if self.in_ph(&add(r, v)) {
                cubic.push((*v, ZERO));
                cubic.push((ZERO, *v));
            }
            for w in &self.pa {
                if v == w || *v == neg(w) {
                    continue;
                }
                if self.in_ph(&add(&add(r, v), w)) {
                    quad.push((*v, *w));
                }
            }
        }
        cubic.sort();
        Ok(GrSets { r: *r, quad, cubic })
    }
}

/// -r - v - v': the second high momentum created together with -r. Swapping r
/// for it leaves the created pair {-r, r+v+v'} unchanged.
pub fn partner(r: &Mom, v: &Mom, w: &Mom) -> Mom {
    neg(&add(&add(r, v), w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcessKind {
    Pair,
    Triplet,
    Quadruplet,
}

pub fn process_kind(v: &Mom, w: &Mom) -> ProcessKind {
    match (*v == ZERO, *w == ZERO) {
        (true, true) => ProcessKind::Pair,
        (false, false) => ProcessKind::Quadruplet,
        _ => ProcessKind::Triplet,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrSets {
    pub r: Mom,
    pub quad: Vec<(Mom, Mom)>,
    pub cubic: Vec<(Mom, Mom)>,
}

impl GrSets {
    /// (0,0), then the triplet labels, then the quadruplet labels.
    pub fn iter(&self) -> impl Iterator<Item = (Mom, Mom)> + '_ {
        std::iter::once((ZERO, ZERO)).chain(self.cubic.iter().copied()).chain(self.quad.iter().copied())
    }

    pub fn len(&self) -> usize {
        1 + self.cubic.len() + self.quad.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &Mom, w: &Mom) -> bool {
        match process_kind(v, w) {
            ProcessKind::Pair => true,
            ProcessKind::Triplet => self.cubic.binary_search(&(*v, *w)).is_ok(),
            ProcessKind::Quadruplet => self.quad.binary_search(&(*v, *w)).is_ok(),
        }
    }

    /// Only the quadruplet labels, used when the condensate is not dressed.
    pub fn quad_only(&self) -> Self {
        Self { r: self.r, quad: self.quad.clone(), cubic: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> MomentumShells {
        MomentumShells::toy(&[], &[[1, 0, 0], [-1, 0, 0]], &[[3, 0, 0], [-3, 0, 0], [4, 0, 0], [-4, 0, 0]]).unwrap()
    }

    #[test]
    fn toy_hand_count() {
        let s = toy();
        let g = s.g_pairs(&[3, 0, 0]).unwrap();
        assert!(g.quad.is_empty());
        assert_eq!(g.cubic, vec![([0, 0, 0], [1, 0, 0]), ([1, 0, 0], [0, 0, 0])]);
        let g = s.g_pairs(&[-3, 0, 0]).unwrap();
        assert_eq!(g.cubic, vec![([-1, 0, 0], [0, 0, 0]), ([0, 0, 0], [-1, 0, 0])]);
        assert_eq!(g.len(), 3);
        assert!(s.g_pairs(&[2, 0, 0]).is_err());
    }

    #[test]
    fn empty_pa_gives_pair_only() {
        let s = MomentumShells::toy(&[[1, 0, 0], [-1, 0, 0]], &[], &[[3, 0, 0], [-3, 0, 0]]).unwrap();
        let g = s.g_pairs(&[3, 0, 0]).unwrap();
        assert_eq!(g.iter().collect::<Vec<_>>(), vec![(ZERO, ZERO)]);
    }

    #[test]
    fn toy_rejects_bad_sets() {
        assert!(MomentumShells::toy(&[], &[[1, 0, 0]], &[[1, 0, 0], [-1, 0, 0]]).is_err());
        assert!(MomentumShells::toy(&[], &[[1, 0, 0]], &[[3, 0, 0]]).is_err());
        assert!(MomentumShells::toy(&[[2, 0, 0]], &[[1, 0, 0]], &[]).is_err());
    }

    #[test]
    fn physical_overlap_rejected() {
        let p = ShellParams { beta: 1e-2, n: 2.0, kappa: 0.4, delta1: 0.1, delta2: 0.05, eps: 0.05 };
        assert!(MomentumShells::build(p, 10.0).is_err());
        let p = ShellParams { beta: 1e-2, n: 1e6, kappa: 0.7, delta1: 0.1, delta2: 0.05, eps: 0.05 };
        assert!(MomentumShells::build(p, 10.0).is_err());
    }

    #[test]
    fn physical_thresholds() {
        let p = ShellParams { beta: 1e-2, n: 1e4, kappa: 0.4, delta1: 3.0 / 7.0, delta2: 0.05, eps: 0.05 };
        let s = MomentumShells::build(p, 2.0 * PI * 27.0).unwrap();
        for k in &s.pg {
            let r = 2.0 * PI * (norm2(k) as f64).sqrt();
            assert!(r > 0.0 && r <= p.pg_radius());
        }
        for k in &s.ph {
            assert!(2.0 * PI * (norm2(k) as f64).sqrt() >= p.ph_radius());
        }
        assert!(!s.ph.is_empty());
    }
}
