mod common;

use common::{gibbs_trace_energy, rel_diff, vhat_table, GibbsMode};
use dilute_bose::bound::{
    exponent_constraints, exponent_optimize_with, interaction_term, theorem_bound, wick_energy, wick_energy_uncorrelated, CloudMode,
};
use dilute_bose::contraction::{norm_formula, theta_indicator, Process};
use dilute_bose::entropy::{binomial, haar_vector, overlap_count, random_density_matrix, seiringer_gap};
use dilute_bose::fock::{
    apply_d, build_curly_d, expectation_interaction, expectation_interaction_full, random_toy, random_vhat, toy_modes, CondensateCheck,
    FockVector, OccupationState, ThetaRule,
};
use dilute_bose::ideal_gas::{critical_density, solve_torus};
use dilute_bose::lattice::{norm2, Mom, ZERO};
use dilute_bose::stochastic::{binomial_tail_below, chernoff_bound, sample_occupations, CutoffParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};
use std::f64::consts::PI;

const MODES: [Mom; 5] = [[0, 0, 0], [1, 0, 0], [-1, 0, 0], [0, 2, 0], [1, 1, 1]];

fn random_vector(rng: &mut ChaCha8Rng) -> FockVector<f64> {
    let mut v = FockVector::zero();
    for _ in 0..rng.random_range(1..5) {
        let s = OccupationState::from_pairs(MODES.iter().map(|k| (*k, rng.random_range(0..3))));
        v.add_term(s, rng.random_range(-1.0..1.0));
    }
    v
}

fn kinetic(v: &FockVector<f64>) -> FockVector<f64> {
    v.apply_diagonal(|k| norm2(k) as f64)
}

fn close(a: &FockVector<f64>, b: &FockVector<f64>, tol: f64) -> bool {
    let d = a.plus(&b.scaled(&-1.0));
    d.norm_sq() <= tol * tol * (1.0 + a.norm_sq())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonical_commutation(seed in any::<u64>(), i in 0usize..5, j in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_vector(&mut rng);
        let (p, q) = (MODES[i], MODES[j]);
        let lhs = v.apply_creation(q).apply_annihilation(p).plus(&v.apply_annihilation(p).apply_creation(q).scaled(&-1.0));
        let rhs = if p == q { v.clone() } else { FockVector::zero() };
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn kinetic_push_through(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_vector(&mut rng);
        let r: Mom = [rng.random_range(-3..4), rng.random_range(-3..4), 3];
        let lows: Vec<Mom> = MODES.to_vec();
        let p = Process::new(r, lows[rng.random_range(0..5)], lows[rng.random_range(0..5)]);
        let [c1, c2] = p.highs();
        let shift = (norm2(&c1) + norm2(&c2) - norm2(&p.v) - norm2(&p.w)) as f64;
        let lhs = kinetic(&v.apply_process(&p));
        let rhs = kinetic(&v).apply_process(&p).plus(&v.apply_process(&p).scaled(&shift));
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn d_conserves_particle_number(seed in 0u64..5000) {
        let cfg = random_toy(seed, ThetaRule::Literal(CondensateCheck::Running)).unwrap();
        let mut v = FockVector::monomial(cfg.g0_state());
        let n = v.particle_number().unwrap();
        for _ in 0..cfg.n_c {
            v = apply_d(&v, &cfg).unwrap();
            if v.is_empty() {
                break;
            }
            prop_assert_eq!(v.particle_number(), Some(n));
        }
    }

    #[test]
    fn theta_exchange_invariance(seed in 0u64..5000, pick in any::<u64>()) {
        let cfg = random_toy(seed, ThetaRule::History).unwrap();
        let procs = cfg.processes().unwrap();
        prop_assume!(!procs.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let list: Vec<Process> = (0..rng.random_range(1..4)).map(|_| procs[rng.random_range(0..procs.len())]).collect();
        let i = rng.random_range(0..list.len());
        let mut swapped = list.clone();
        swapped[i] = swapped[i].exchanged();
        prop_assert_eq!(theta_indicator(&list), theta_indicator(&swapped));
    }

    #[test]
    fn norm_monotone_in_cutoff_order(seed in 0u64..5000) {
        let cfg = random_toy(seed, ThetaRule::History).unwrap();
        let mut bigger = cfg.clone();
        bigger.n_c += 1;
        prop_assume!(cfg.pairs_enabled() == bigger.pairs_enabled());
        prop_assert!(norm_formula(&bigger).unwrap() >= norm_formula(&cfg).unwrap());
    }

    #[test]
    fn interaction_blocks_sum_to_full(seed in 0u64..5000) {
        let cfg = random_toy(seed, ThetaRule::History).unwrap();
        let modes = toy_modes(&cfg);
        let vhat = random_vhat(seed ^ 0x5eed, &modes);
        let d = build_curly_d(&cfg).unwrap();
        let blocks = expectation_interaction(&d.vector, &vhat, &cfg.shells).unwrap();
        prop_assert_eq!(blocks.total(), expectation_interaction_full(&d.vector, &vhat, &modes).unwrap());
    }

    #[test]
    fn occupation_moments(seed in any::<u64>(), beta in 0.05f64..1.0) {
        let energies = vec![0.3, 1.0, 2.5];
        let params = CutoffParams { beta, mu0: -0.2, m: 0.0, n_samples: 4000, seed, energies: energies.clone(), in_a: vec![true; 3] };
        let draws: Vec<f64> = (0..4000u64).map(|i| sample_occupations(&params, i).unwrap().iter().sum::<u64>() as f64).collect();
        let gammas: Vec<f64> = energies.iter().map(|e| 1.0 / (beta * (e + 0.2)).exp_m1()).collect();
        let mean: f64 = gammas.iter().sum();
        // sum of independent geometrics: Var = sum g(1+g); E N^2 = Var + mean^2
        let var: f64 = gammas.iter().map(|g| g * (1.0 + g)).sum();
        let second = var + mean * mean;
        let n = draws.len() as f64;
        let m1 = draws.iter().sum::<f64>() / n;
        let m2 = draws.iter().map(|x| x * x).sum::<f64>() / n;
        let s2 = (draws.iter().map(|x| (x * x - m2).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        prop_assert!((m1 - mean).abs() <= 3.0 * (var / n).sqrt() + 1e-12, "mean {} vs {}", m1, mean);
        prop_assert!((m2 - second).abs() <= 3.0 * s2 / n.sqrt() + 1e-12, "second moment {} vs {}", m2, second);
    }

    #[test]
    fn binomial_tail_matches_cdf_and_bound(n in 1usize..60, q in 0.02f64..0.98, frac in 0.0f64..1.0) {
        let m = frac * n as f64 * q;
        let direct = binomial_tail_below(n, q, m);
        let k = m.ceil() as i64 - 1;
        let oracle = if k < 0 { 0.0 } else { Binomial::new(q, n as u64).unwrap().cdf(k as u64) };
        prop_assert!((direct - oracle).abs() < 1e-12);
        let p = CutoffParams::uniform(n, q, m, 1, 0).unwrap();
        prop_assert!(direct <= chernoff_bound(&p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn projection_gap_nonnegative(seed in any::<u64>(), d in 2usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_density_matrix(d, &mut rng);
        let vecs: Vec<_> = (0..d).map(|_| haar_vector(d, &mut rng)).collect();
        prop_assert!(seiringer_gap(&g, &vecs).unwrap().gap >= -1e-9);
    }

    #[test]
    fn interaction_term_bounds(beta in 0.01f64..10.0, rho in 1e-3f64..10.0, a in 1e-4f64..0.1) {
        let rc = critical_density(beta).unwrap();
        let t = interaction_term(rho, rc, a);
        let base = 4.0 * PI * a * rho * rho;
        prop_assert!(t >= base * (1.0 - 1e-12) && t <= 2.0 * base * (1.0 + 1e-12));
    }

    #[test]
    fn bound_monotone_in_constant(beta in 0.1f64..10.0, rho in 1e-3f64..1.0, c1 in 0.0f64..5.0, dc in 0.0f64..5.0) {
        let lo = theorem_bound(beta, rho, 1e-2, c1).unwrap();
        let hi = theorem_bound(beta, rho, 1e-2, c1 + dc).unwrap();
        prop_assert!(hi.total >= lo.total);
        prop_assert!(lo.error_budget >= 0.0);
    }

    #[test]
    fn exponent_optimum_permutation_stable(seed in any::<u64>()) {
        let mut forms = exponent_constraints();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..forms.len()).rev() {
            forms.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(exponent_optimize_with(&forms).unwrap(), exponent_optimize_with(&exponent_constraints()).unwrap());
    }

    #[test]
    fn torus_chemical_potential_negative(beta in 0.01f64..2.0, n in 1.0f64..1e4) {
        let p = solve_torus(beta, n, 1.0).unwrap();
        prop_assert!(p.mu0 < 0.0);
        prop_assert!(p.residual < 1e-9 * n);
    }

    #[test]
    fn wick_matches_trace(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ks: [Mom; 2] = [[1, 0, 0], [rng.random_range(-1..2), 1, rng.random_range(0..2)]];
        let cloud: Vec<GibbsMode> = ks.iter().map(|k| GibbsMode {
            k: *k,
            energy: norm2(k) as f64 * rng.random_range(0.5..2.0),
            q: rng.random_range(0.05..0.5),
        }).collect();
        let mut modes = vec![ZERO];
        modes.extend(ks);
        let c = rng.random_range(0.1..2.0);
        let table = vhat_table(&modes, |s| c / (1.0 + norm2(s) as f64));
        let n0 = rng.random_range(0..6);
        let brute = gibbs_trace_energy(&cloud, n0, &table);
        let wm: Vec<CloudMode> = cloud.iter().map(|m| CloudMode { k: m.k, energy: m.energy, gamma: m.gamma() }).collect();
        prop_assert!(rel_diff(brute, wick_energy(&wm, n0 as f64, |s| table[s])) < 1e-10);
    }
}

#[test]
fn overlap_bounds_and_binomial_monotonicity() {
    for m in 1..=12usize {
        for n in 0..=(m / 4).min(3) {
            let o = overlap_count(m, n).unwrap();
            assert!(o.exact <= o.bound1, "{m} {n}");
            assert!(o.stirling_constant().is_finite() && o.stirling_constant() > 0.0);
        }
        for k in 1..=m.div_ceil(2) as u64 {
            assert!(binomial(m as u64, k) >= binomial(m as u64, k - 1));
        }
    }
}

#[test]
fn wick_limits_on_the_torus() {
    let (beta, n, kappa) = (0.3, 50.0, 0.34);
    let mu0 = solve_torus(beta, n, 1.0).unwrap().mu0;
    let free = wick_energy_uncorrelated(beta, n, kappa, 10.0, |_| 0.0, 1e-12).unwrap();
    // oracle: kinetic sum over shells of |k|^2 <= 200 by direct enumeration
    let mut kin = 0.0;
    for x in -15i64..=15 {
        for y in -15i64..=15 {
            for z in -15i64..=15 {
                let k2 = (x * x + y * y + z * z) as f64;
                if k2 > 0.0 && k2 <= 200.0 {
                    let e = 4.0 * PI * PI * k2;
                    kin += e / (beta * (e - mu0)).exp_m1();
                }
            }
        }
    }
    assert!(rel_diff(free, kin) < 1e-10, "{free} vs {kin}");
    let e = wick_energy(&[], 7.0, |_| 0.8 * n.powf(kappa - 1.0));
    assert!(rel_diff(e, 0.8 * 7.0 * 6.0 / (2.0 * n.powf(1.0 - kappa))) < 1e-14);
    assert!(matches!(wick_energy_uncorrelated(1e-6, n, kappa, 1.0, |_| 0.0, 1e-12), Err(dilute_bose::Error::Config(_))));
}

#[test]
fn pure_condensate_interaction_block() {
    let shells = dilute_bose::shells::MomentumShells::toy(&[], &[], &[[3, 0, 0], [-3, 0, 0]]).unwrap();
    let v: FockVector<f64> = FockVector::monomial(OccupationState::from_pairs([(ZERO, 6)]));
    let mut table = std::collections::BTreeMap::new();
    for s in [ZERO, [3, 0, 0], [-3, 0, 0], [6, 0, 0], [-6, 0, 0]] {
        table.insert(s, 0.25);
    }
    let b = expectation_interaction(&v, &table, &shells).unwrap();
    let norm: f64 = OccupationState::from_pairs([(ZERO, 6)]).monomial_norm();
    assert!((b.v0 / norm - 0.25 * 15.0).abs() < 1e-12);
    assert_eq!(b.v2a + b.v2b + b.v4, 0.0);
    let zero: std::collections::BTreeMap<Mom, f64> = table.keys().map(|k| (*k, 0.0)).collect();
    assert_eq!(expectation_interaction(&v, &zero, &shells).unwrap().total(), 0.0);
}
