//! Thermodynamics of the non-interacting Bose gas: infinite volume at fixed
//! (beta, rho), and the gas on a cubic torus at fixed expected particle number.

use crate::error::{domain, Error, Result};
use crate::lattice::{gaussian_cutoff, gaussian_tail_bound, shell_counts};
use crate::numerics::{bisect_increasing, integrate, polylog_exp, KahanSum, ZETA_3_2, ZETA_5_2};
use std::f64::consts::PI;

/// Infinite-volume parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasParams {
    pub beta: f64,
    pub rho: f64,
}

impl GasParams {
    pub fn new(beta: f64, rho: f64) -> Result<Self> {
        if !(beta > 0.0 && rho > 0.0) {
            return domain(format!("need beta > 0 and rho > 0, got beta={beta}, rho={rho}"));
        }
        Ok(Self { beta, rho })
    }
}

/// Unit-torus parameters in rescaled form: beta_N = beta / L^2, N expected
/// particles, kappa the scaling exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusParams {
    pub beta_n: f64,
    pub n: f64,
    pub kappa: f64,
}

impl TorusParams {
    pub fn new(beta_n: f64, n: f64, kappa: f64) -> Result<Self> {
        if !(beta_n > 0.0) || !(n >= 1.0) {
            return domain(format!("need beta_N > 0 and N >= 1, got {beta_n}, {n}"));
        }
        if !(kappa > 1.0 / 3.0 && kappa < 2.0 / 3.0) {
            return domain(format!("kappa = {kappa} outside (1/3, 2/3)"));
        }
        Ok(Self { beta_n, n, kappa })
    }

    /// Box side L = N^{1-kappa} and physical inverse temperature beta = beta_N L^2.
    pub fn side(&self) -> f64 {
        self.n.powf(1.0 - self.kappa)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("beta must be positive and finite, got {beta}"));
    }
    Ok(())
}

/// zeta(3/2) (4 pi beta)^{-3/2}.
pub fn critical_density_series(beta: f64) -> f64 {
    ZETA_3_2 * (4.0 * PI * beta).powf(-1.5)
}

/// (2 pi)^{-3} int dp 1/(e^{beta p^2} - 1) by quadrature in q = sqrt(beta) |p|.
pub fn critical_density_quadrature(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    // q^2/(e^{q^2}-1) -> 1 at q = 0; below e^{-49} beyond q = 7.
    let g = |q: f64| if q == 0.0 { 1.0 } else { q * q / (q * q).exp_m1() };
    let i = integrate(g, 0.0, 7.0, 1e-15)?;
    Ok(4.0 * PI * i / (2.0 * PI).powi(3) * beta.powf(-1.5))
}

/// Critical density at inverse temperature beta. The series value is returned
/// after checking it against quadrature.
pub fn critical_density(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let s = critical_density_series(beta);
    let q = critical_density_quadrature(beta)?;
    if ((s - q) / s).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "critical density: series {s:e} and quadrature {q:e} disagree"
        )));
    }
    Ok(s)
}

/// Inverse critical temperature (1/4 pi) (rho / zeta(3/2))^{-2/3}.
pub fn critical_beta(rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return domain(format!("rho must be positive and finite, got {rho}"));
    }
    Ok((rho / ZETA_3_2).powf(-2.0 / 3.0) / (4.0 * PI))
}

/// Result of the infinite-volume variational problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfiniteVolumePoint {
    pub beta: f64,
    pub rho: f64,
    pub rho_c: f64,
    /// Maximizing chemical potential (0 on the condensed branch).
    pub mu: f64,
    pub f0: f64,
    /// [rho - rho_c]_+
    pub condensate_density: f64,
}

/// mu = 0 free energy density -zeta(5/2) / (beta (4 pi beta)^{3/2}).
pub fn free_energy_mu0_series(beta: f64) -> f64 {
    -ZETA_5_2 / (beta * (4.0 * PI * beta).powf(1.5))
}

/// Same quantity as `free_energy_mu0_series` by radial quadrature.
pub fn free_energy_mu0_quadrature(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let g = |q: f64| if q == 0.0 { 0.0 } else { q * q * (-(-q * q).exp_m1()).ln() };
    let i = integrate(g, 0.0, 8.0, 1e-16)?;
    Ok(4.0 * PI * i / (2.0 * PI).powi(3) * beta.powf(-1.5) / beta)
}

/// f_0(beta, rho) = sup_{mu<=0} [ (beta (2pi)^3)^{-1} int ln(1 - e^{-beta(p^2-mu)}) dp + mu rho ].
pub fn free_energy_infinite(beta: f64, rho: f64) -> Result<InfiniteVolumePoint> {
    let p = GasParams::new(beta, rho)?;
    let lam = (4.0 * PI * p.beta).powf(-1.5);
    let rho_c = ZETA_3_2 * lam;
    if p.rho >= rho_c {
        return Ok(InfiniteVolumePoint {
            beta,
            rho,
            rho_c,
            mu: 0.0,
            f0: free_energy_mu0_series(beta),
            condensate_density: rho - rho_c,
        });
    }
    // Density equation lam * Li_{3/2}(e^{-t}) = rho in t = -beta mu > 0, solved in ln t.
    let target = p.rho / lam;
    let g = |u: f64| -> f64 {
        let t = u.exp();
        target - polylog_exp(1.5, t).unwrap_or(f64::NAN)
    };
    let lo = (1e-300f64).ln();
    let hi = (target.ln().abs() + 50.0).max(1.0).ln() + 1.0;
    let u = bisect_increasing(g, lo, hi).map_err(|e| {
        Error::Numeric(format!("density equation at beta={beta}, rho={rho}: {e}"))
    })?;
    let t = u.exp();
    let mu = -t / p.beta;
    let li52 = polylog_exp(2.5, t)?;
    Ok(InfiniteVolumePoint {
        beta,
        rho,
        rho_c,
        mu,
        f0: -lam * li52 / p.beta + mu * p.rho,
        condensate_density: 0.0,
    })
}

/// A finite set of single-particle energies with multiplicities. The energy
/// list must start with the zero mode (energy 0, multiplicity 1) when one exists.
#[derive(Clone, Debug)]
pub struct ModeSpectrum {
    pub levels: Vec<(f64, u64)>,
    /// Certified bound on what truncation dropped from any occupancy-type sum.
    pub tail: f64,
}

impl ModeSpectrum {
    /// Momenta (2 pi / L) Z^3 with |k|^2 <= n_max chosen so the dropped Gaussian
    /// tail is below `tol`.
    pub fn torus(beta: f64, side: f64, tol: f64) -> Result<Self> {
        check_beta(beta)?;
        let unit = 4.0 * PI * PI / (side * side);
        let a = beta * unit;
        let n_max = gaussian_cutoff(a, tol);
        if n_max > 30_000_000 {
            return Err(Error::Config(format!(
                "lattice cutoff |k|^2 <= {n_max} needed for tail {tol:e}; beta/L^2 = {} too small",
                beta / (side * side)
            )));
        }
        let counts = shell_counts(n_max);
        let levels = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(n, &c)| (unit * n as f64, c))
            .collect();
        let r = (n_max as f64 + 1.0).sqrt();
        let tail = gaussian_tail_bound(a, r) / (-(-a * (n_max as f64 + 1.0)).exp_m1());
        Ok(Self { levels, tail })
    }

    pub fn single_mode() -> Self {
        Self { levels: vec![(0.0, 1)], tail: 0.0 }
    }

    /// Expected number of particles at chemical potential mu < 0.
    pub fn occupancy(&self, beta: f64, mu: f64) -> f64 {
        let mut acc = KahanSum::new();
        for &(e, m) in &self.levels {
            acc.add(m as f64 / (beta * (e - mu)).exp_m1());
        }
        acc.value()
    }

    /// beta^{-1} sum ln(1 - e^{-beta(e - mu)}).
    pub fn grand_potential(&self, beta: f64, mu: f64) -> f64 {
        let mut acc = KahanSum::new();
        for &(e, m) in &self.levels {
            acc.add(m as f64 * (-(-beta * (e - mu)).exp_m1()).ln());
        }
        acc.value() / beta
    }
}

/// Ideal gas at fixed expected particle number on a finite mode spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealGasPoint {
    pub beta: f64,
    pub n: f64,
    pub mu0: f64,
    /// Expected zero-mode occupation (e^{-beta mu0} - 1)^{-1}.
    pub n0_id: f64,
    /// Grand potential plus mu0 N.
    pub big_f0: f64,
    /// Occupancy residual |sum - N|.
    pub residual: f64,
    pub tail: f64,
}

/// Solve sum_p (e^{beta(e_p - mu)} - 1)^{-1} = N for mu < 0 by bisection on
/// [-60/beta, -1e-300]. The spectrum must contain the zero mode.
pub fn solve_spectrum(spec: &ModeSpectrum, beta: f64, n: f64) -> Result<IdealGasPoint> {
    check_beta(beta)?;
    if !(n >= 1.0) {
        return domain(format!("N must be >= 1, got {n}"));
    }
    if spec.tail > 1e-9 * n {
        return Err(Error::Config(format!("truncation tail {:e} exceeds tolerance", spec.tail)));
    }
    let mu0 = bisect_increasing(|mu| spec.occupancy(beta, mu) - n, -60.0 / beta, -1e-300)?;
    let sum = spec.occupancy(beta, mu0);
    let residual = (sum - n).abs();
    if residual > 1e-9 * n {
        return Err(Error::Numeric(format!(
            "occupancy residual {residual:e} at mu0 = {mu0:e} (N = {n})"
        )));
    }
    let n0_id = 1.0 / (-beta * mu0).exp_m1();
    Ok(IdealGasPoint {
        beta,
        n,
        mu0,
        n0_id,
        big_f0: spec.grand_potential(beta, mu0) + mu0 * n,
        residual,
        tail: spec.tail,
    })
}

/// Ideal gas on the box of side `side` at inverse temperature beta with N particles.
pub fn solve_torus(beta: f64, n: f64, side: f64) -> Result<IdealGasPoint> {
    let spec = ModeSpectrum::torus(beta, side, 1e-13 * n.max(1.0))?;
    solve_spectrum(&spec, beta, n)
}

/// mu0(beta_N, N) on the unit torus.
pub fn chemical_potential_torus(beta_n: f64, n: f64) -> Result<f64> {
    Ok(solve_torus(beta_n, n, 1.0)?.mu0)
}

/// N0_id(beta_N, N) on the unit torus.
pub fn condensate_torus(beta_n: f64, n: f64) -> Result<f64> {
    Ok(solve_torus(beta_n, n, 1.0)?.n0_id)
}

/// F0(beta_N, N) on the unit torus.
pub fn free_energy_torus(beta_n: f64, n: f64) -> Result<f64> {
    Ok(solve_torus(beta_n, n, 1.0)?.big_f0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_density_at_unit_beta() {
        let r = critical_density(1.0).unwrap();
        // series oracle sum_k k^{-3/2} (4 pi)^{-3/2}, partial sums plus integral tail
        let mut s = 0.0;
        let kmax = 2_000_000u64;
        for k in 1..=kmax {
            s += (k as f64).powf(-1.5);
        }
        s += 2.0 / (kmax as f64 + 0.5).sqrt();
        let oracle = s * (4.0 * PI).powf(-1.5);
        assert!((r - oracle).abs() < 1e-10, "{r} vs {oracle}");
        assert!((r - 0.058_643_6).abs() < 1e-7);
    }

    #[test]
    fn critical_density_scaling_and_errors() {
        let a = critical_density(0.7).unwrap();
        let b = critical_density(2.8).unwrap();
        assert!((b / a - 0.125).abs() < 1e-14);
        assert!(critical_density(0.0).is_err());
        assert!(critical_density(-1.0).is_err());
        assert!(critical_beta(0.0).is_err());
    }

    #[test]
    fn critical_beta_values() {
        assert!((critical_beta(ZETA_3_2).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let a = critical_beta(0.3).unwrap();
        let b = critical_beta(2.4).unwrap();
        assert!((b / a - 0.25).abs() < 1e-14);
        let rc = critical_density(1.0).unwrap();
        assert!((critical_beta(rc).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn condensed_branch_value() {
        let rc = critical_density(1.0).unwrap();
        let p = free_energy_infinite(1.0, 2.0 * rc).unwrap();
        assert_eq!(p.mu, 0.0);
        // series oracle sum_k k^{-5/2} (pi/beta)^{3/2} / (2 pi)^3
        let mut z = 0.0;
        let kmax = 200_000u64;
        for k in 1..=kmax {
            z += (k as f64).powf(-2.5);
        }
        z += (2.0 / 3.0) * (kmax as f64 + 0.5).powf(-1.5);
        let oracle = -z * PI.powf(1.5) / (2.0 * PI).powi(3);
        assert!(((p.f0 - oracle) / oracle).abs() < 1e-11, "{} vs {oracle}", p.f0);
        assert!((p.f0 + 0.030_114_229_487).abs() < 1e-11);
        let q = free_energy_mu0_quadrature(1.0).unwrap();
        assert!(((p.f0 - q) / q).abs() < 1e-10);
    }

    #[test]
    fn normal_branch_is_supremum() {
        let beta = 1.3;
        let rho = 0.5 * critical_density(beta).unwrap();
        let p = free_energy_infinite(beta, rho).unwrap();
        assert!(p.mu < 0.0);
        let lam = (4.0 * PI * beta).powf(-1.5);
        let obj = |mu: f64| -lam * polylog_exp(2.5, -beta * mu).unwrap() / beta + mu * rho;
        for d in [1e-3, 1e-2, 0.1] {
            assert!(obj(p.mu * (1.0 + d)) <= p.f0 + 1e-15);
            assert!(obj(p.mu * (1.0 - d)) <= p.f0 + 1e-15);
        }
        let dens = lam * polylog_exp(1.5, -beta * p.mu).unwrap();
        assert!(((dens - rho) / rho).abs() < 1e-13);
    }

    #[test]
    fn low_temperature_limit() {
        let f1 = free_energy_infinite(10.0, 1.0).unwrap().f0;
        let f2 = free_energy_infinite(100.0, 1.0).unwrap().f0;
        assert!(f1 < 0.0 && f2 < 0.0 && f2.abs() < f1.abs());
    }

    #[test]
    fn torus_identities() {
        let sol = solve_torus(0.05, 200.0, 1.0).unwrap();
        assert!(sol.mu0 < 0.0);
        let back = -(1.0 + 1.0 / sol.n0_id).ln() / sol.beta;
        assert!(((back - sol.mu0) / sol.mu0).abs() < 1e-12);
        assert!(sol.n0_id > 0.0 && sol.n0_id < 200.0);
        let spec = ModeSpectrum::torus(0.05, 1.0, 1e-11).unwrap();
        let excited = spec.occupancy(0.05, sol.mu0) - sol.n0_id;
        assert!((sol.n0_id + excited - 200.0).abs() < 1e-9 * 200.0);
    }

    #[test]
    fn torus_zero_mode_term() {
        let beta = 0.02;
        let sol = solve_torus(beta, 500.0, 1.0).unwrap();
        let t0 = (-(beta * sol.mu0).exp_m1()).ln() / beta;
        let t1 = -(1.0 + sol.n0_id).ln() / beta;
        assert!(((t0 - t1) / t1).abs() < 1e-12);
    }

    #[test]
    fn torus_limits() {
        let n = 10.0;
        let mu = chemical_potential_torus(50.0, n).unwrap();
        assert!((mu + (1.0 + 1.0 / n).ln() / 50.0).abs() < 1e-14);
        assert!((condensate_torus(50.0, n).unwrap() - n).abs() < 1e-9);
        let m1 = chemical_potential_torus(0.05, 100.0).unwrap();
        let m2 = chemical_potential_torus(0.05, 200.0).unwrap();
        assert!(m2 > m1);
    }

    #[test]
    fn single_mode_toy() {
        let spec = ModeSpectrum::single_mode();
        let (beta, n) = (0.7, 3.0);
        let sol = solve_spectrum(&spec, beta, n).unwrap();
        let mu = -(1.0 + 1.0 / n).ln() / beta;
        assert!((sol.mu0 - mu).abs() < 1e-14);
        let f = (-(beta * mu).exp_m1()).ln() / beta + mu * n;
        assert!((sol.big_f0 - f).abs() < 1e-13);
    }

    #[test]
    fn torus_free_energy_approaches_bulk() {
        // F0(beta/L^2, N)/L^5 tends to f0(beta, N/L^3).
        let (beta, rho) = (1.0, 0.1);
        let f = free_energy_infinite(beta, rho).unwrap().f0;
        let mut prev = f64::INFINITY;
        for side in [4.0f64, 8.0, 16.0] {
            let n = rho * side.powi(3);
            let big = free_energy_torus(beta / (side * side), n).unwrap();
            let dev = (big / side.powi(5) - f).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev / f.abs() < 0.05);
    }
}
