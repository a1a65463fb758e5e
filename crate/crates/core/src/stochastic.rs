//! Sampling the ideal-gas Gibbs state on P_G, the occupied-mode count on P_A,
//! its Chernoff tail bound, and moments of the state truncated at M occupied
//! modes.

use crate::error::{domain, Result};
use crate::ideal_gas::{critical_density, solve_torus};
use crate::numerics::{fit_slope, pairwise_sum};
use crate::lattice::norm2;
use crate::shells::{MomentumShells, ShellParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Modes with occupation probability below this are never sampled.
const NEGLIGIBLE: f64 = 1e-18;

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffParams {
    pub beta: f64,
    pub mu0: f64,
    /// Threshold M on the number of occupied P_A modes.
    pub m: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// One-particle energies of the P_G modes.
    pub energies: Vec<f64>,
    /// Whether each mode belongs to P_A.
    pub in_a: Vec<bool>,
}

impl CutoffParams {
    /// Modes of P_G on the unit torus, energies (2 pi k)^2.
    pub fn from_shells(shells: &MomentumShells, beta: f64, mu0: f64, m: f64, n_samples: usize, seed: u64) -> Result<Self> {
        let mut energies = Vec::with_capacity(shells.pg.len());
        let mut in_a = Vec::with_capacity(shells.pg.len());
        for k in &shells.pg {
            energies.push(4.0 * PI * PI * norm2(k) as f64);
            in_a.push(shells.in_pa(k));
        }
        let p = Self { beta, mu0, m, n_samples, seed, energies, in_a };
        p.check()?;
        Ok(p)
    }

    /// n modes of P_A, each occupied with probability q.
    pub fn uniform(n: usize, q: f64, m: f64, n_samples: usize, seed: u64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return domain(format!("occupation probability {q} not in (0, 1)"));
        }
        let beta = 1.0;
        let mu0 = -1.0;
        let e = mu0 - q.ln() / beta;
        let p = Self { beta, mu0, m, n_samples, seed, energies: vec![e; n], in_a: vec![true; n] };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if !(self.mu0 < 0.0) {
            return domain(format!("mu0 = {} must be negative", self.mu0));
        }
        if !(self.beta > 0.0) {
            return domain(format!("beta = {} must be positive", self.beta));
        }
        Ok(())
    }

    /// e^{-beta(e - mu0)}: probability that mode i is occupied.
    pub fn occupation_probability(&self, i: usize) -> f64 {
        (-self.beta * (self.energies[i] - self.mu0)).exp()
    }

    /// E(Y) = sum over P_A of the occupation probabilities.
    pub fn expected_occupied(&self) -> f64 {
        pairwise_sum(
            &(0..self.energies.len()).filter(|&i| self.in_a[i]).map(|i| self.occupation_probability(i)).collect::<Vec<_>>(),
        )
    }

    /// M <= E(Y)/2.
    pub fn condition_on_m(&self) -> bool {
        self.m <= 0.5 * self.expected_occupied()
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Occupations of every P_G mode for sample `index`: independent geometric
/// draws with success probability 1 - e^{-beta(p^2 - mu0)}.
pub fn sample_occupations(params: &CutoffParams, index: u64) -> Result<Vec<u64>> {
    params.check()?;
    let mut rng = stream(params.seed, index);
    let mut out = vec![0u64; params.energies.len()];
    for (i, e) in params.energies.iter().enumerate() {
        let x = params.beta * (e - params.mu0);
        if (-x).exp() < NEGLIGIBLE {
            continue;
        }
        let g = Geometric::new(-(-x).exp_m1()).map_err(|err| crate::Error::Numeric(err.to_string()))?;
        out[i] = g.sample(&mut rng);
    }
    Ok(out)
}

/// exp(-(E(Y) - M)^2 / (2 E(Y))).
pub fn chernoff_bound(params: &CutoffParams) -> Result<f64> {
    let e = params.expected_occupied();
    if params.m > e {
        return domain(format!("M = {} exceeds E(Y) = {e}", params.m));
    }
    Ok((-(e - params.m).powi(2) / (2.0 * e)).exp())
}

/// P(Y < m) for Y ~ Binomial(n, q), by direct summation of the mass function.
pub fn binomial_tail_below(n: usize, q: f64, m: f64) -> f64 {
    let mut total = 0.0;
    let mut pmf = (1.0 - q).powi(n as i32);
    for k in 0..=n {
        if (k as f64) >= m {
            break;
        }
        total += pmf;
        pmf *= (n - k) as f64 / (k + 1) as f64 * q / (1.0 - q);
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Empirical P(Y < M). Only whether a P_A mode is empty matters, so each mode
/// is drawn as the Bernoulli variable chi(N_p != 0).
pub fn mc_tail_probability(params: &CutoffParams) -> Result<TailEstimate> {
    params.check()?;
    let probs: Vec<f64> = (0..params.energies.len())
        .filter(|&i| params.in_a[i])
        .map(|i| params.occupation_probability(i))
        .filter(|&q| q >= NEGLIGIBLE)
        .collect();
    let hits: Vec<f64> = (0..params.n_samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(params.seed, s);
            let y = probs.iter().filter(|&&q| rng.random::<f64>() < q).count();
            if (y as f64) < params.m {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let n = params.n_samples as f64;
    let p = pairwise_sum(&hits) / n;
    Ok(TailEstimate { estimate: p, stderr: (p * (1.0 - p) / n).sqrt() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrendConfig {
    pub betas: Vec<f64>,
    pub delta1: f64,
    pub delta2: f64,
    /// N = density_factor * rho_c(beta) on the unit torus.
    pub density_factor: f64,
    /// M as a fraction of E(Y).
    pub m_fraction: f64,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrendRow {
    pub beta: f64,
    pub n_modes: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub ratio: f64,
    pub acceptance: f64,
    /// Var(N_A) beta^2.
    pub variance_scaled: f64,
    /// E(sum over P_G \ P_A of N_p) / beta^{-3/2 + delta1/2}.
    pub undressed_scaled: f64,
    pub warning: Option<String>,
}

/// Predicted beta power: beta^{-3(p+1)/2}(1 + beta^{-delta1(2q-3)/2}) for
/// q > 0, beta^{-3p/2} for q = 0.
pub fn predicted_power(beta: f64, p: u32, q: u32, delta1: f64) -> f64 {
    if q == 0 {
        beta.powf(-1.5 * p as f64)
    } else {
        beta.powf(-1.5 * (p + 1) as f64) * (1.0 + beta.powf(-delta1 * (2.0 * q as f64 - 3.0) / 2.0))
    }
}

struct Draw {
    accepted: bool,
    stat: f64,
    n_a: f64,
    undressed: f64,
}

/// Monte-Carlo estimate of sum_{v in P_A} E[N^p N_v^q] in the truncated state
/// (E[N^p] when q = 0), by rejection of draws with fewer than M occupied P_A
/// modes.
pub fn truncated_moment_trend(cfg: &TrendConfig, p: u32, q: u32) -> Result<Vec<TrendRow>> {
    let mut rows = Vec::new();
    for &beta in &cfg.betas {
        let sp = ShellParams { beta, n: 1e6, kappa: 0.34, delta1: cfg.delta1, delta2: cfg.delta2, eps: 0.01 };
        let shells = MomentumShells::build(sp, 0.0)?;
        if shells.pg.is_empty() {
            return domain(format!("P_G is empty at beta = {beta}"));
        }
        let n = (cfg.density_factor * critical_density(beta)?).max(1.0);
        let mu0 = solve_torus(beta, n, 1.0)?.mu0;
        let mut params = CutoffParams::from_shells(&shells, beta, mu0, 0.0, cfg.n_samples, cfg.seed)?;
        params.m = cfg.m_fraction * params.expected_occupied();
        let draws: Vec<Draw> = (0..cfg.n_samples as u64)
            .into_par_iter()
            .map(|s| {
                let occ = sample_occupations(&params, s)?;
                let mut y = 0usize;
                let (mut total, mut n_a, mut vq, mut undressed) = (0u64, 0u64, 0.0, 0u64);
                for (i, &k) in occ.iter().enumerate() {
                    total += k;
                    if params.in_a[i] {
                        n_a += k;
                        if k > 0 {
                            y += 1;
                        }
                        vq += (k as f64).powi(q as i32);
                    } else {
                        undressed += k;
                    }
                }
                let base = (total as f64).powi(p as i32);
                let stat = if q == 0 { base } else { base * vq };
                Ok(Draw { accepted: y as f64 >= params.m, stat, n_a: n_a as f64, undressed: undressed as f64 })
            })
            .collect::<Result<Vec<_>>>()?;
        let acc: Vec<&Draw> = draws.iter().filter(|d| d.accepted).collect();
        let k = acc.len() as f64;
        let acceptance = k / cfg.n_samples as f64;
        let mean = |f: &dyn Fn(&Draw) -> f64| pairwise_sum(&acc.iter().map(|d| f(d)).collect::<Vec<_>>()) / k;
        let m1 = mean(&|d| d.stat);
        let m2 = mean(&|d| d.stat * d.stat);
        let na1 = mean(&|d| d.n_a);
        let na2 = mean(&|d| d.n_a * d.n_a);
        let und = mean(&|d| d.undressed);
        let predicted = predicted_power(beta, p, q, cfg.delta1);
        let warning = (acceptance < 0.5).then(|| format!("rejection rate {:.3} above 0.5; cutoff too aggressive", 1.0 - acceptance));
        rows.push(TrendRow {
            beta,
            n_modes: params.energies.len(),
            estimate: m1,
            stderr: ((m2 - m1 * m1).max(0.0) / k).sqrt(),
            predicted,
            ratio: m1 / predicted,
            acceptance,
            variance_scaled: (na2 - na1 * na1) * beta * beta,
            undressed_scaled: und / beta.powf(-1.5 + cfg.delta1 / 2.0),
            warning,
        });
    }
    Ok(rows)
}

/// Largest over smallest ratio in a trend table.
pub fn ratio_spread(rows: &[TrendRow]) -> f64 {
    let max = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    max / min
}

/// Fitted slope of ln(estimate) against ln(beta).
pub fn trend_exponent(rows: &[TrendRow]) -> f64 {
    let x: Vec<f64> = rows.iter().map(|r| r.beta.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.estimate.ln()).collect();
    fit_slope(&x, &y)
}
