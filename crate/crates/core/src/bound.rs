//! The free-energy upper bound in infinite and finite volume, the exponent
//! optimization behind the error rate, the energy of the uncorrelated trial
//! state, and CSV sweeps.

use crate::error::{Error, Result};
use crate::ideal_gas::{free_energy_infinite, solve_torus};
use crate::lattice::{add, gaussian_cutoff, norm2, shell_counts, vectors_in_shell, Mom};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeLimits {
    /// Flag rows with beta rho^{2/3} below this.
    pub min_beta_rho: f64,
    /// Flag rows with rho a^3 above this.
    pub max_rho_a3: f64,
}

impl Default for RegimeLimits {
    fn default() -> Self {
        Self { min_beta_rho: 1.0, max_rho_a3: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub beta: f64,
    pub rho: f64,
    pub a: f64,
    pub f0: f64,
    pub rho_c: f64,
    pub interaction: f64,
    pub error_budget: f64,
    pub total: f64,
    /// "ok" or a ';'-joined list of violated regime conditions.
    pub regime: String,
}

/// 4 pi a (2 rho^2 - [rho - rho_c]_+^2).
pub fn interaction_term(rho: f64, rho_c: f64, a: f64) -> f64 {
    let cond = (rho - rho_c).max(0.0);
    4.0 * PI * a * (2.0 * rho * rho - cond * cond)
}

pub fn theorem_bound(beta: f64, rho: f64, a: f64, c: f64) -> Result<BoundRow> {
    theorem_bound_with(beta, rho, a, c, RegimeLimits::default())
}

/// f_0(beta, rho) + 4 pi a (2 rho^2 - [rho - rho_c]_+^2) + C a rho^2 (rho a^3)^{1/7}.
pub fn theorem_bound_with(beta: f64, rho: f64, a: f64, c: f64, limits: RegimeLimits) -> Result<BoundRow> {
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("scattering length a = {a} must be nonnegative")));
    }
    let ig = free_energy_infinite(beta, rho)?;
    let interaction = interaction_term(rho, ig.rho_c, a);
    let error_budget = c * a * rho * rho * (rho * a.powi(3)).powf(1.0 / 7.0);
    let mut flags = Vec::new();
    if beta * rho.powf(2.0 / 3.0) < limits.min_beta_rho {
        flags.push("beta_rho_low");
    }
    if rho * a.powi(3) > limits.max_rho_a3 {
        flags.push("rho_a3_high");
    }
    Ok(BoundRow {
        beta,
        rho,
        a,
        f0: ig.f0,
        rho_c: ig.rho_c,
        interaction,
        error_budget,
        total: ig.f0 + interaction + error_budget,
        regime: if flags.is_empty() { "ok".into() } else { flags.join(";") },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteVolumeRow {
    pub beta_n: f64,
    pub n: f64,
    pub kappa: f64,
    pub a: f64,
    pub big_f0: f64,
    pub n0_id: f64,
    pub interaction: f64,
    pub error_term: f64,
    pub total: f64,
    pub regime: String,
}

/// Error exponents {-eps, 6 kappa - 3 + 2 eps + delta1/3, 12 kappa - 6 + 6 eps, -delta1/3}.
pub fn finite_volume_exponents(kappa: f64, eps: f64, delta1: f64) -> [f64; 4] {
    [-eps, 6.0 * kappa - 3.0 + 2.0 * eps + delta1 / 3.0, 12.0 * kappa - 6.0 + 6.0 * eps, -delta1 / 3.0]
}

/// F_0(beta_N, N) + 4 pi a N^{kappa-1} (2N^2 - N0_id^2) + C N^{kappa+1} max_j N^{e_j}.
pub fn finite_volume_bound(beta_n: f64, n: f64, kappa: f64, a: f64, c: f64, eps: f64, delta1: f64) -> Result<FiniteVolumeRow> {
    let ig = solve_torus(beta_n, n, 1.0)?;
    let n0 = ig.n0_id;
    let interaction = 4.0 * PI * a * n.powf(kappa - 1.0) * (2.0 * n * n - n0 * n0);
    let worst = finite_volume_exponents(kappa, eps, delta1).into_iter().fold(f64::MIN, f64::max);
    let error_term = c * n.powf(kappa + 1.0) * n.powf(worst);
    let mut flags = Vec::new();
    if beta_n < n.powf(-2.0 / 3.0) {
        flags.push("beta_low");
    }
    if beta_n > n.powf(-kappa) {
        flags.push("beta_high");
    }
    Ok(FiniteVolumeRow {
        beta_n,
        n,
        kappa,
        a,
        big_f0: ig.big_f0,
        n0_id: n0,
        interaction,
        error_term,
        total: ig.big_f0 + interaction + error_term,
        regime: if flags.is_empty() { "ok".into() } else { flags.join(";") },
    })
}

pub type Q = BigRational;

fn q(num: i64, den: i64) -> Q {
    Q::new(num.into(), den.into())
}

/// c_g gamma + c_e eps + c_d delta1 + c_0.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    pub coef: [Q; 3],
    pub constant: Q,
}

impl LinearForm {
    pub fn new(g: Q, e: Q, d: Q, c: Q) -> Self {
        Self { coef: [g, e, d], constant: c }
    }

    pub fn eval(&self, x: &[Q; 3]) -> Q {
        let mut out = self.constant.clone();
        for (c, v) in self.coef.iter().zip(x) {
            out += c * v;
        }
        out
    }
}

/// The five rates whose minimum is the error exponent, in (gamma, eps, delta1).
pub fn exponent_constraints() -> Vec<LinearForm> {
    let z = Q::zero;
    vec![
        LinearForm::new(z(), q(1, 1), z(), z()),
        LinearForm::new(q(-3, 1), q(-2, 1), q(-1, 3), q(3, 1)),
        LinearForm::new(q(-6, 1), q(-6, 1), z(), q(6, 1)),
        LinearForm::new(q(1, 1), z(), z(), q(-2, 3)),
        LinearForm::new(z(), z(), q(1, 3), z()),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSolution {
    pub gamma: Q,
    pub eps: Q,
    pub delta1: Q,
    pub min_value: Q,
}

impl ExponentSolution {
    pub fn point(&self) -> [Q; 3] {
        [self.gamma.clone(), self.eps.clone(), self.delta1.clone()]
    }
}

/// Gauss-Jordan elimination on a square rational system; None if singular.
fn solve_rational(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Q::one() / a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

/// gamma > 2/3, 0 < eps < 1/3, delta1 > 0.
pub fn admissible(x: &[Q; 3]) -> bool {
    x[0] > q(2, 3) && x[1].is_positive() && x[1] < q(1, 3) && x[2].is_positive()
}

pub fn min_rate(forms: &[LinearForm], x: &[Q; 3]) -> Q {
    forms.iter().map(|f| f.eval(x)).min().expect("nonempty constraint list")
}

/// Maximizes the minimum of the forms over the admissible box by exact vertex
/// enumeration: every 3 + 1 = 4-subset of forms set equal to a common value t.
pub fn exponent_optimize_with(forms: &[LinearForm]) -> Result<ExponentSolution> {
    let k = forms.len();
    let mut best: Option<ExponentSolution> = None;
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                for m in l + 1..k {
                    // f(x) - t = 0 for the four chosen forms, unknowns (gamma, eps, delta1, t)
                    let rows: Vec<Vec<Q>> = [i, j, l, m]
                        .iter()
                        .map(|&s| {
                            let f = &forms[s];
                            vec![f.coef[0].clone(), f.coef[1].clone(), f.coef[2].clone(), -Q::one()]
                        })
                        .collect();
                    let rhs: Vec<Q> = [i, j, l, m].iter().map(|&s| -forms[s].constant.clone()).collect();
                    let Some(sol) = solve_rational(rows, rhs) else { continue };
                    let x = [sol[0].clone(), sol[1].clone(), sol[2].clone()];
                    if !admissible(&x) {
                        continue;
                    }
                    let v = min_rate(forms, &x);
                    if v != sol[3] {
                        continue;
                    }
                    if best.as_ref().is_none_or(|b| v > b.min_value) {
                        best = Some(ExponentSolution { gamma: x[0].clone(), eps: x[1].clone(), delta1: x[2].clone(), min_value: v });
                    }
                }
            }
        }
    }
    best.ok_or_else(|| Error::Numeric("no admissible vertex".into()))
}

pub fn exponent_optimize() -> Result<ExponentSolution> {
    exponent_optimize_with(&exponent_constraints())
}

/// One mode of the thermal cloud for the Wick evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudMode {
    pub k: Mom,
    pub energy: f64,
    pub gamma: f64,
}

/// Energy of the uncorrelated trial state with exactly N_0 condensed particles
/// and a quasi-free cloud with occupations gamma on the listed modes:
/// kinetic, condensate-cloud exchange, condensate self-interaction, direct
/// and exchange cloud terms. `vhat(s)` is the interaction coefficient V_N-hat(s).
pub fn wick_energy<F: Fn(&Mom) -> f64>(modes: &[CloudMode], n0: f64, vhat: F) -> f64 {
    let v0 = vhat(&[0, 0, 0]);
    let kin: f64 = modes.iter().map(|m| m.energy * m.gamma).sum();
    let sg: f64 = modes.iter().map(|m| m.gamma).sum();
    let sg2: f64 = modes.iter().map(|m| m.gamma * m.gamma).sum();
    let cross: f64 = modes.iter().map(|m| vhat(&m.k) * m.gamma).sum();
    let index: BTreeMap<Mom, f64> = modes.iter().map(|m| (m.k, m.gamma)).collect();
    let mut exch = 0.0;
    for u in modes {
        for w in modes {
            if u.k == w.k {
                continue;
            }
            // p = w - u, with u + p = w in the cloud
            let p = [w.k[0] - u.k[0], w.k[1] - u.k[1], w.k[2] - u.k[2]];
            exch += vhat(&p) * index[&add(&u.k, &p)] * u.gamma;
        }
    }
    kin + n0 * cross + 0.5 * v0 * n0 * (n0 - 1.0) + 0.5 * v0 * (2.0 * n0 * sg + sg * sg + sg2) + 0.5 * exch
}

/// Largest cloud for which the O(|P_G|^2) exchange sum is attempted.
pub const WICK_MODE_LIMIT: usize = 20_000;

/// Wick energy on the unit torus with the condensate holding exactly `n0`
/// particles and the cloud on all nonzero k with |k|^2 <= n_max, where n_max
/// is chosen so the dropped occupation is below `tol`. Occupations are
/// gamma_0 at the ideal-gas chemical potential mu_0(beta_N, N) and the
/// interaction coefficient is N^{kappa-1} V-hat(2 pi |k| / N^{1-kappa}).
pub fn wick_energy_uncorrelated<F: Fn(f64) -> f64>(beta_n: f64, n: f64, kappa: f64, n0: f64, vhat: F, tol: f64) -> Result<f64> {
    let mu0 = solve_torus(beta_n, n, 1.0)?.mu0;
    let a = beta_n * 4.0 * PI * PI;
    // gamma_0(k) <= e^{-a k^2} / (1 - e^{-a}) for k != 0
    let n_max = gaussian_cutoff(a, -tol * (-a).exp_m1());
    let count: u64 = shell_counts(n_max).iter().skip(1).sum();
    if count > WICK_MODE_LIMIT as u64 {
        return Err(Error::Config(format!(
            "{count} cloud modes needed for tail {tol:e} exceed the limit {WICK_MODE_LIMIT}"
        )));
    }
    let pg: Vec<Mom> = vectors_in_shell(1, n_max as i64);
    let modes: Vec<CloudMode> = pg
        .iter()
        .map(|k| {
            let e = 4.0 * PI * PI * norm2(k) as f64;
            CloudMode { k: *k, energy: e, gamma: 1.0 / (beta_n * (e - mu0)).exp_m1() }
        })
        .collect();
    let x = n.powf(1.0 - kappa);
    let scale = n.powf(kappa - 1.0);
    Ok(wick_energy(&modes, n0, |s| scale * vhat(2.0 * PI * (norm2(s) as f64).sqrt() / x)))
}

/// Grid experiment read from TOML.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// "theorem" or "finite_volume".
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub rho: Vec<f64>,
    #[serde(default)]
    pub n: Vec<f64>,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_delta1")]
    pub delta1: f64,
}

fn default_kind() -> String {
    "theorem".into()
}
fn default_a() -> f64 {
    1e-2
}
fn default_c() -> f64 {
    1.0
}
fn default_kappa() -> f64 {
    0.34
}
fn default_eps() -> f64 {
    1.0 / 7.0
}
fn default_delta1() -> f64 {
    3.0 / 7.0
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.kind != "theorem" && cfg.kind != "finite_volume" {
            return Err(Error::Config(format!("field `kind`: unknown sweep kind {:?}", cfg.kind)));
        }
        Ok(cfg)
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with header, one row per grid point in lexicographic grid order.
pub fn sweep_csv(cfg: &SweepConfig) -> Result<String> {
    let mut out = String::new();
    if cfg.kind == "theorem" {
        out.push_str("beta,rho,a,f0,rho_c,interaction,error_budget,total,regime\n");
        let grid: Vec<(f64, f64)> = cfg.beta.iter().flat_map(|&b| cfg.rho.iter().map(move |&r| (b, r))).collect();
        let rows: Vec<BoundRow> = grid.par_iter().map(|&(b, r)| theorem_bound(b, r, cfg.a, cfg.c)).collect::<Result<_>>()?;
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                num(r.beta),
                num(r.rho),
                num(r.a),
                num(r.f0),
                num(r.rho_c),
                num(r.interaction),
                num(r.error_budget),
                num(r.total),
                r.regime
            );
        }
    } else {
        out.push_str("beta_n,n,kappa,a,big_f0,n0_id,interaction,error_term,total,regime\n");
        let grid: Vec<(f64, f64)> = cfg.beta.iter().flat_map(|&b| cfg.n.iter().map(move |&n| (b, n))).collect();
        let rows: Vec<FiniteVolumeRow> = grid
            .par_iter()
            .map(|&(b, n)| finite_volume_bound(b, n, cfg.kappa, cfg.a, cfg.c, cfg.eps, cfg.delta1))
            .collect::<Result<_>>()?;
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                num(r.beta_n),
                num(r.n),
                num(r.kappa),
                num(r.a),
                num(r.big_f0),
                num(r.n0_id),
                num(r.interaction),
                num(r.error_term),
                num(r.total),
                r.regime
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_is_exact() {
        let s = exponent_optimize().unwrap();
        assert_eq!(s.gamma, q(17, 21));
        assert_eq!(s.eps, q(1, 7));
        assert_eq!(s.delta1, q(3, 7));
        assert_eq!(s.min_value, q(1, 7));
    }

    #[test]
    fn interaction_branches() {
        let rc = 2.0;
        assert_eq!(interaction_term(1.0, rc, 0.1), 8.0 * PI * 0.1);
        let left = interaction_term(rc, rc, 0.1);
        let right = interaction_term(rc + 1e-12, rc, 0.1);
        assert!((left - right).abs() < 1e-9);
    }

    #[test]
    fn empty_grid_is_header_only() {
        let cfg = SweepConfig::parse("beta = []\nrho = []\n").unwrap();
        assert_eq!(sweep_csv(&cfg).unwrap().lines().count(), 1);
    }

    #[test]
    fn malformed_config_names_the_field() {
        let err = SweepConfig::parse("beta = [1.0]\nrho = \"x\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("rho") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn wick_pure_condensate() {
        let e = wick_energy(&[], 5.0, |_| 0.3);
        assert!((e - 0.3 * 10.0).abs() < 1e-15);
    }
}
