//! Riemann-sum sandwich bounds for monotone radial functions on (2 pi / L) Z^3,
//! and the finite-volume lower bound on the condensate density.

use crate::error::{domain, Error, Result};
use crate::ideal_gas::{critical_density, solve_torus, ModeSpectrum};
use crate::lattice::shell_counts;
use crate::numerics::{integrate, KahanSum};
use std::f64::consts::PI;

/// Nonnegative, monotone decreasing radial profile.
#[derive(Clone, Copy)]
pub struct RadialFunction<'a> {
    pub name: &'a str,
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
    /// The profile blows up like 1/p^2 at p = 0. The origin is then left out of
    /// the lattice sum, and bounds whose integration region reaches p = 0 are
    /// infinite (-inf below, +inf above).
    pub singular_at_origin: bool,
    /// Radius beyond which the profile is treated as tail.
    pub tail_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichResult {
    pub lower: f64,
    /// Lattice sum over |p| <= tail radius plus the midpoint tail estimate.
    pub exact_sum: f64,
    /// Half-width of the bracket for the unsummed lattice tail.
    pub tail_uncertainty: f64,
    pub upper: f64,
    pub side: f64,
    pub kappa_cut: f64,
}

impl SandwichResult {
    pub fn holds(&self) -> bool {
        self.lower <= self.exact_sum - self.tail_uncertainty
            && self.exact_sum + self.tail_uncertainty <= self.upper
    }

    /// (upper - lower) / exact_sum.
    pub fn relative_gap(&self) -> f64 {
        (self.upper - self.lower) / self.exact_sum
    }
}

fn check_monotone(rf: &RadialFunction, from: f64) -> Result<()> {
    let start = if from > 0.0 { from } else { 1e-6 };
    let stop = rf.tail_radius.max(start * 2.0);
    let steps = 2000;
    let mut prev = f64::INFINITY;
    for i in 0..=steps {
        let r = start + (stop - start) * i as f64 / steps as f64;
        let v = (rf.f)(r);
        if !(v >= 0.0) {
            return domain(format!("{}: negative or undefined value at p = {r}", rf.name));
        }
        if v > prev * (1.0 + 1e-12) + 1e-300 {
            return domain(format!("{}: not monotone decreasing near p = {r}", rf.name));
        }
        prev = v;
    }
    Ok(())
}

/// 4 pi int_a^b f(r) w(r) r^2 dr.
fn radial_integral(f: &dyn Fn(f64) -> f64, w: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let g = |r: f64| if r == 0.0 { 0.0 } else { 4.0 * PI * (f)(r) * (w)(r) * r * r };
    let scale = (0..=64)
        .map(|i| g(a + (b - a) * i as f64 / 64.0).abs())
        .fold(0.0, f64::max)
        * (b - a);
    if scale == 0.0 {
        return Ok(0.0);
    }
    integrate(g, a, b, 1e-12 * scale)
}

/// Lower and upper integral bounds around sum_{p in (2pi/L)Z^3, |p| >= kappa} f(|p|).
pub fn lattice_sum_sandwich(rf: &RadialFunction, side: f64, kappa_cut: f64) -> Result<SandwichResult> {
    if !(side > 0.0) || !(kappa_cut >= 0.0) {
        return domain(format!("need L > 0 and kappa >= 0, got L={side}, kappa={kappa_cut}"));
    }
    let h = 2.0 * PI / side;
    let vol = (side / (2.0 * PI)).powi(3);
    let r_tail = rf.tail_radius.max(kappa_cut + 4.0 * h);
    check_monotone(rf, kappa_cut.max(h))?;
    let f = rf.f;

    let w_lo = |r: f64| 1.0 - 3.0 * PI / (side * r);
    let w_hi = |r: f64| 1.0 + 3.0 * PI / (side * r) + 6.0 * PI / (side * side * r * r);
    let one = |_r: f64| 1.0;

    let lower = if rf.singular_at_origin && kappa_cut == 0.0 {
        f64::NEG_INFINITY
    } else {
        vol * (radial_integral(f, &w_lo, kappa_cut, r_tail)? + radial_integral(f, &w_lo, r_tail, 4.0 * r_tail)?)
    };
    let up_from = (kappa_cut - 3f64.sqrt() * h).max(0.0);
    let upper = if rf.singular_at_origin && up_from == 0.0 {
        f64::INFINITY
    } else {
        vol * (radial_integral(f, &w_hi, up_from, r_tail)? + radial_integral(f, &w_hi, r_tail, 4.0 * r_tail)?)
    };

    // Lattice part by shells n = |k|^2 with h sqrt(n) in [kappa, r_tail].
    let n_max = ((r_tail / h).powi(2)).floor() as u64;
    if n_max > 50_000_000 {
        return Err(Error::Config(format!("lattice shell cutoff {n_max} too large")));
    }
    let counts = shell_counts(n_max);
    let mut acc = KahanSum::new();
    for (n, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let p = h * (n as f64).sqrt();
        if p < kappa_cut {
            continue;
        }
        if n == 0 && rf.singular_at_origin {
            continue;
        }
        acc.add(c as f64 * f(p));
    }
    // Tail beyond r_tail: midpoint of [0, 2T] with T the volume-scaled integral
    // from r_tail - sqrt(3) h.
    let t = vol * (radial_integral(f, &one, (r_tail - 3f64.sqrt() * h).max(0.0), 4.0 * r_tail)?);
    Ok(SandwichResult {
        lower,
        exact_sum: acc.value() + t,
        tail_uncertainty: t,
        upper,
        side,
        kappa_cut,
    })
}

/// Finite-volume condensate density compared with its infinite-volume proxy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CondensateBound {
    pub beta: f64,
    pub n: f64,
    pub side: f64,
    pub rho: f64,
    pub rho_c: f64,
    /// gamma_0(0) / L^3 from the exact torus solve.
    pub rho0_exact: f64,
    /// (1/(beta L)) |ln(beta^{1/2}/L)|
    pub log_term: f64,
    pub constant: f64,
    /// [rho - rho_c - C log_term]_+
    pub bound: f64,
    /// beta << L^2, read as beta / L^2 <= 0.1.
    pub hypothesis_ok: bool,
}

impl CondensateBound {
    pub fn holds(&self) -> bool {
        self.rho0_exact >= self.bound
    }
}

pub fn condensate_density_lower_bound(beta: f64, n: f64, side: f64, constant: f64) -> Result<CondensateBound> {
    let sol = solve_torus(beta, n, side)?;
    let rho = n / side.powi(3);
    let rho_c = critical_density(beta)?;
    let log_term = (beta.sqrt() / side).ln().abs() / (beta * side);
    Ok(CondensateBound {
        beta,
        n,
        side,
        rho,
        rho_c,
        rho0_exact: sol.n0_id / side.powi(3),
        log_term,
        constant,
        bound: (rho - rho_c - constant * log_term).max(0.0),
        hypothesis_ok: beta / (side * side) <= 0.1,
    })
}

/// L^{-3} sum_{p != 0} (e^{beta p^2} - 1)^{-1} on (2 pi/L) Z^3.
pub fn lattice_critical_density(beta: f64, side: f64) -> Result<f64> {
    let spec = ModeSpectrum::torus(beta, side, 1e-14)?;
    let mut acc = KahanSum::new();
    for &(e, m) in spec.levels.iter().skip(1) {
        acc.add(m as f64 / (beta * e).exp_m1());
    }
    Ok(acc.value() / side.powi(3))
}

/// Constant C in the condensate bound, fitted as the largest observed ratio
/// |lattice rho_c - rho_c| / ((1/(beta L)) |ln(beta^{1/2}/L)|) over the grid.
pub fn fit_condensate_constant(betas: &[f64], sides: &[f64]) -> Result<f64> {
    let mut c: f64 = 0.0;
    for &b in betas {
        let rc = critical_density(b)?;
        for &l in sides {
            let lat = lattice_critical_density(b, l)?;
            let log_term = (b.sqrt() / l).ln().abs() / (b * l);
            c = c.max((lat - rc).abs() / log_term);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(p: f64) -> f64 {
        (-p * p).exp()
    }

    #[test]
    fn gaussian_sandwich_l8() {
        let rf = RadialFunction { name: "gauss", f: &gauss, singular_at_origin: false, tail_radius: 8.0 };
        let s = lattice_sum_sandwich(&rf, 8.0, 0.0).unwrap();
        assert!(s.holds(), "{s:?}");
        let cont = (8.0 / (2.0 * PI)).powi(3) * PI.powf(1.5);
        assert!(((s.exact_sum - cont) / cont).abs() < 1e-6);
    }

    #[test]
    fn zero_function() {
        let z = |_p: f64| 0.0;
        let rf = RadialFunction { name: "zero", f: &z, singular_at_origin: false, tail_radius: 5.0 };
        let s = lattice_sum_sandwich(&rf, 8.0, 1.0).unwrap();
        assert_eq!((s.lower, s.exact_sum, s.upper), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rejects_increasing_profile() {
        let g = |p: f64| p;
        let rf = RadialFunction { name: "ramp", f: &g, singular_at_origin: false, tail_radius: 5.0 };
        assert!(matches!(lattice_sum_sandwich(&rf, 8.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn condensate_clamp_below_critical() {
        let rc = critical_density(1.0).unwrap();
        let side: f64 = 16.0;
        let b = condensate_density_lower_bound(1.0, 0.5 * rc * side.powi(3), side, 1.0).unwrap();
        assert_eq!(b.bound, 0.0);
        assert!(b.holds());
    }

    #[test]
    fn hypothesis_flag() {
        let b = condensate_density_lower_bound(50.0, 10.0, 4.0, 1.0).unwrap();
        assert!(!b.hypothesis_ok);
    }
}
