use dilute_bose::contraction::{kinetic_upper_terms, leading_interaction, norm_formula, theta_indicator, Process};
use dilute_bose::fock::{
    build_curly_d, expectation_kinetic, rational, theta_operator, CondensateCheck, Rational, ThetaRule, TrialConfig,
};
use dilute_bose::lattice::{norm2, Mom, ZERO};
use dilute_bose::numerics::fit_slope;
use dilute_bose::scattering::{eta_coefficients, solve_neumann, EtaField, Potential};
use dilute_bose::shells::{MomentumShells, ShellParams};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

fn pair_toy(ph: &[Mom], eta: &[(Mom, Rational)], n0: u32, n_c: usize, n: i64) -> TrialConfig<Rational> {
    let mut table = BTreeMap::new();
    for (k, v) in eta {
        table.insert(*k, v.clone());
        table.insert([-k[0], -k[1], -k[2]], v.clone());
    }
    TrialConfig {
        shells: MomentumShells::toy(&[], &[], ph).unwrap(),
        eta: table,
        n_alpha: BTreeMap::new(),
        n0,
        n_c,
        n: rational(n, 1),
        theta: ThetaRule::History,
    }
}

#[test]
fn trivial_norms() {
    let ph = [[3, 0, 0], [-3, 0, 0], [0, 4, 0], [0, -4, 0]];
    let cfg = pair_toy(&ph, &[([3, 0, 0], rational(1, 2)), ([0, 4, 0], rational(-2, 3))], 6, 0, 5);
    assert_eq!(norm_formula(&cfg).unwrap(), Rational::one());
    let zero = pair_toy(&ph, &[([3, 0, 0], Rational::zero()), ([0, 4, 0], Rational::zero())], 6, 3, 5);
    assert_eq!(norm_formula(&zero).unwrap(), Rational::one());
    let k = kinetic_upper_terms(&zero).unwrap();
    assert!(k.k_q.is_zero() && k.k_c.is_zero() && k.k_p.is_zero());
}

#[test]
fn pure_pair_kinetic_is_saturated() {
    // n_c = 1 and P_A empty: the only excitations are pairs and nothing is discarded
    let ph = [[3, 0, 0], [-3, 0, 0], [0, 4, 0], [0, -4, 0], [2, 2, 2], [-2, -2, -2]];
    let eta = [([3, 0, 0], rational(1, 2)), ([0, 4, 0], rational(-2, 3)), ([2, 2, 2], rational(3, 4))];
    for (n0, n) in [(2, 2), (5, 7), (8, 3)] {
        let cfg = pair_toy(&ph, &eta, n0, 1, n);
        let d = build_curly_d(&cfg).unwrap();
        let g0 = cfg.g0_state().monomial_norm::<Rational>();
        let brute = expectation_kinetic(&d.vector, &cfg.shells).total / g0;
        let sum: Rational = ph.iter().map(|r| Rational::from_integer(norm2(r).into()) * cfg.eta[r].clone() * cfg.eta[r].clone()).sum();
        let n0q = Rational::from_integer(n0.into());
        let intermediate = n0q.clone() * (n0q.clone() - Rational::one()) / (cfg.n.clone() * cfg.n.clone()) * sum;
        assert_eq!(brute, intermediate);
        // the relaxed bound replaces N0(N0 - 1) by N0^2
        assert!(kinetic_upper_terms(&cfg).unwrap().k_p >= intermediate);
    }
}

#[test]
fn theta_kills_colliding_pairs() {
    let r = [3, 0, 0];
    let a = Process::new(r, ZERO, ZERO);
    let b = Process::new([-3, 0, 0], ZERO, ZERO);
    assert!(theta_indicator(&[a]));
    assert!(!theta_indicator(&[a, b]));
}

#[test]
fn literal_cut_off_blocks_a_hand_built_collision() {
    // the quadruplet's two high momenta are already occupied, so v + v' - s is
    // occupied for an occupied high s
    let v: Mom = [1, 0, 0];
    let w: Mom = [0, 1, 0];
    let r: Mom = [3, 0, 0];
    let clash: Mom = [-2, 1, 0];
    let ph = [r, [-3, 0, 0], clash, [2, -1, 0]];
    let mut eta = BTreeMap::new();
    for k in ph {
        eta.insert(k, rational(1, 1));
    }
    let cfg = TrialConfig {
        shells: MomentumShells::toy(&[v, w], &[v, w], &ph).unwrap(),
        eta,
        n_alpha: [(v, 1), (w, 1)].into_iter().collect(),
        n0: 4,
        n_c: 2,
        n: rational(4, 1),
        theta: ThetaRule::Literal(CondensateCheck::Running),
    };
    let p = Process::new([2, -1, 0], v, w);
    assert_eq!(p.highs(), [clash, r]);
    let mut state = cfg.g0_state();
    state.set(r, 1);
    state.set(clash, 1);
    assert!(!theta_operator(&state, &p, &cfg, CondensateCheck::Running));
    assert!(!theta_indicator(&[p, p]));
    let fresh = cfg.g0_state();
    assert!(theta_operator(&fresh, &p, &cfg, CondensateCheck::Running));
}

fn physical(n: f64) -> (dilute_bose::scattering::ScatteringSolution, Potential, EtaField, MomentumShells) {
    let pot = Potential::square_barrier(1.0, 1.0).unwrap();
    let sol = solve_neumann(&pot, 0.45, n, 0.35).unwrap();
    let eta = eta_coefficients(&sol, 4.0 * sol.scale()).unwrap();
    let sp = ShellParams { beta: n.powf(-2.0 / 3.0), n, kappa: 0.35, delta1: 3.0 / 7.0, delta2: 0.1, eps: 0.05 };
    (sol, pot, eta, MomentumShells::build(sp, 0.0).unwrap())
}

#[test]
fn leading_interaction_approaches_scattering_length() {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for e in [6, 8, 10] {
        let n = 2f64.powi(e);
        let (sol, pot, eta, shells) = physical(n);
        let li = leading_interaction(&sol, &pot, &eta, &shells, 0.5 * n).unwrap();
        let half_v0 = 0.5 * n.powf(-0.65) * pot.fourier(0.0, 12);
        assert!(li.bracket < half_v0);
        assert!(li.combined_ratio() > 1.0);
        xs.push(n.ln());
        ys.push((li.combined_ratio() - 1.0).ln());
    }
    // deviation shrinks like a small negative power of N
    let slope = fit_slope(&xs, &ys);
    assert!(slope < 0.0 && slope > -0.5, "slope {slope}");
}

#[test]
fn leading_interaction_without_correlations() {
    let n = 256.0;
    let (sol, pot, eta, shells) = physical(n);
    let zero = EtaField { values: vec![0.0; eta.values.len()], counts: eta.counts.clone() };
    let li = leading_interaction(&sol, &pot, &zero, &shells, 100.0).unwrap();
    let half_v0 = 0.5 * n.powf(-0.65) * pot.fourier(0.0, 12);
    assert!((li.bracket - half_v0).abs() < 1e-15 * half_v0.abs().max(1.0));
    assert!((li.value - half_v0 * (2.0 * n * n - 1e4)).abs() < 1e-9 * li.value.abs());
    let toy = MomentumShells::toy(&[], &[], &[[3, 0, 0], [-3, 0, 0]]).unwrap();
    assert!(leading_interaction(&sol, &pot, &eta, &toy, 1.0).is_err());
}
