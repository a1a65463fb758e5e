use clap::{Args, Parser, Subcommand};
use dilute_bose::bound::{exponent_optimize, finite_volume_bound, sweep_csv, theorem_bound, SweepConfig};
use dilute_bose::config::ToyFile;
use dilute_bose::contraction::norm_formula;
use dilute_bose::entropy::{fitted_entropy_constant, overlap_count, random_density_matrix, haar_vector, seiringer_gap};
use dilute_bose::fock::{curly_d_norm, random_toy, ThetaRule};
use dilute_bose::ideal_gas::{free_energy_infinite, solve_torus};
use dilute_bose::lattice_sums::{lattice_sum_sandwich, RadialFunction};
use dilute_bose::scattering::{
    eta_coefficients, eta_norms, scattering_identity_residual, scattering_length, solve_neumann, square_barrier_length, Potential,
};
use dilute_bose::shells::{MomentumShells, ShellParams};
use dilute_bose::stochastic::{binomial_tail_below, chernoff_bound, mc_tail_probability, CutoffParams};
use dilute_bose::{Error, Result};
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "dilute-bose", version, about = "Ingredients of the dilute Bose gas free-energy upper bound")]
struct Cli {
    /// TOML input for sweep, fock-verify and norm-check.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file, or - for stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Worker threads (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ideal gas in infinite volume, and on the unit torus when --n is given.
    Ideal(IdealArgs),
    /// Scattering length and Neumann problem for a square barrier.
    Scatter(ScatterArgs),
    /// Correlation coefficients eta and their norms.
    Eta(EtaArgs),
    /// Sizes of the momentum shells.
    Shells(ShellArgs),
    /// Brute-force norm of the dressed vector against the contraction formula on one toy file.
    FockVerify,
    /// Formula against brute force, and norm >= 1, on random toys.
    NormCheck(NormCheckArgs),
    /// Chernoff bound, exact tail and Monte Carlo tail for the occupied-mode count.
    McCutoff(McArgs),
    /// Projection entropy inequality and overlap counting.
    EntropyCheck(EntropyArgs),
    /// Riemann-sum sandwich for three monotone profiles.
    LatticeCheck,
    /// The infinite-volume bound, or the finite-volume one when --n is given.
    Bound(BoundArgs),
    /// CSV grid of bounds from --config.
    Sweep,
    /// Exact optimization of the error exponents.
    Exponents,
}

#[derive(Args)]
struct IdealArgs {
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Particle number on the unit torus (beta is then beta_N).
    #[arg(long)]
    n: Option<f64>,
}

#[derive(Args)]
struct ScatterArgs {
    #[arg(long, default_value_t = 1.0)]
    v0: f64,
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    #[arg(long, default_value_t = 1024.0)]
    n: f64,
    #[arg(long, default_value_t = 0.35)]
    kappa: f64,
    #[arg(long, default_value_t = 0.45)]
    ell: f64,
}

#[derive(Args)]
struct EtaArgs {
    #[command(flatten)]
    scatter: ScatterArgs,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
}

#[derive(Args)]
struct ShellArgs {
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[arg(long, default_value_t = 1e4)]
    n: f64,
    #[arg(long, default_value_t = 0.34)]
    kappa: f64,
    #[arg(long, default_value_t = 3.0 / 7.0)]
    delta1: f64,
    #[arg(long, default_value_t = 0.7)]
    delta2: f64,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
}

#[derive(Args)]
struct NormCheckArgs {
    #[arg(long, default_value_t = 100)]
    count: u64,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 40)]
    modes: usize,
    #[arg(long, default_value_t = 0.3)]
    q: f64,
    #[arg(long, default_value_t = 6.0)]
    m: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 1e-2)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Particle number for the finite-volume bound (beta is then beta_N).
    #[arg(long)]
    n: Option<f64>,
    #[arg(long, default_value_t = 0.34)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0 / 7.0)]
    eps: f64,
    #[arg(long, default_value_t = 3.0 / 7.0)]
    delta1: f64,
}

fn read_config(cli: &Cli) -> Result<String> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn verification(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Verification(what.into()))
    }
}

fn run(cli: &Cli, out: &mut String) -> Result<()> {
    match &cli.command {
        Command::Ideal(a) => match a.n {
            None => {
                let p = free_energy_infinite(a.beta, a.rho)?;
                let _ = writeln!(out, "beta={:e}\nrho={:e}\nrho_c={:e}\nmu={:e}\nf0={:e}\ncondensate_density={:e}", p.beta, p.rho, p.rho_c, p.mu, p.f0, p.condensate_density);
            }
            Some(n) => {
                let p = solve_torus(a.beta, n, 1.0)?;
                let _ = writeln!(out, "beta_n={:e}\nn={:e}\nmu0={:e}\nn0_id={:e}\nF0={:e}\nresidual={:e}", p.beta, p.n, p.mu0, p.n0_id, p.big_f0, p.residual);
            }
        },
        Command::Scatter(a) => {
            let pot = Potential::square_barrier(a.v0, a.r0)?;
            let sl = scattering_length(&pot)?;
            let sol = solve_neumann(&pot, a.ell, a.n, a.kappa)?;
            let scale = a.n.powf(3.0 - 3.0 * a.kappa) * a.ell.powi(3);
            let _ = writeln!(out, "a={:e}\na_closed_form={:e}\nlambda_scaled_over_3a={:e}\nint_vf_over_8pi_a={:e}", sl.a, square_barrier_length(a.v0, a.r0), sol.lambda_ell * scale / (3.0 * sol.a), sol.int_v_f() / (8.0 * PI * sol.a));
        }
        Command::Eta(a) => {
            let s = &a.scatter;
            let pot = Potential::square_barrier(s.v0, s.r0)?;
            let sol = solve_neumann(&pot, s.ell, s.n, s.kappa)?;
            let x = sol.scale();
            let eta = eta_coefficients(&sol, 4.0 * x)?;
            let params = ShellParams { beta: 1e-2, n: s.n, kappa: s.kappa, delta1: 3.0 / 7.0, delta2: 0.7, eps: a.eps };
            let shells = MomentumShells::build(params, 4.0 * x)?;
            let norms = eta_norms(&eta, &shells);
            let _ = writeln!(out, "identity_residual={:e}\nl1={:e}\nl2_sq={:e}\nlinf={:e}\nh1_sq={:e}", scattering_identity_residual(&eta, &sol), norms.l1, norms.l2_sq, norms.linf, norms.h1_sq);
        }
        Command::Shells(a) => {
            let p = ShellParams { beta: a.beta, n: a.n, kappa: a.kappa, delta1: a.delta1, delta2: a.delta2, eps: a.eps };
            let s = MomentumShells::build(p, p.ph_radius() * 1.05)?;
            let _ = writeln!(out, "pg={}\npa={}\nph_enumerated={}", s.pg.len(), s.pa.len(), s.ph.len());
        }
        Command::FockVerify => {
            let inst = ToyFile::parse(&read_config(cli)?)?.build()?;
            let brute = curly_d_norm(&inst.config)?;
            let formula = norm_formula(&inst.config)?;
            let _ = writeln!(out, "brute_force={brute}\nformula={formula}\nequal={}", brute == formula);
            verification(brute == formula, "contraction formula differs from the brute-force norm")?;
        }
        Command::NormCheck(a) => {
            let mut bad = 0;
            for i in 0..a.count {
                let cfg = random_toy(cli.seed.wrapping_add(i), ThetaRule::History)?;
                let brute = curly_d_norm(&cfg)?;
                let ok = brute == norm_formula(&cfg)? && brute >= num_rational::BigRational::one();
                if !ok {
                    bad += 1;
                    let _ = writeln!(out, "seed {} failed, norm {}", cli.seed.wrapping_add(i), brute.to_f64().unwrap_or(f64::NAN));
                }
            }
            let _ = writeln!(out, "instances={}\nfailures={bad}", a.count);
            verification(bad == 0, "norm check failed")?;
        }
        Command::McCutoff(a) => {
            let p = CutoffParams::uniform(a.modes, a.q, a.m, a.samples, cli.seed)?;
            let bound = chernoff_bound(&p)?;
            let exact = binomial_tail_below(a.modes, a.q, a.m);
            let mc = mc_tail_probability(&p)?;
            let _ = writeln!(out, "chernoff={:.16e}\nexact={:.16e}\nmc={:.16e}\nmc_stderr={:.16e}", bound, exact, mc.estimate, mc.stderr);
            verification(exact <= bound && mc.estimate <= bound + 3.0 * mc.stderr, "tail exceeds the Chernoff bound")?;
        }
        Command::EntropyCheck(a) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut worst = f64::INFINITY;
            for _ in 0..a.trials {
                let g = random_density_matrix(a.dim, &mut rng);
                let vecs: Vec<_> = (0..a.dim).map(|_| haar_vector(a.dim, &mut rng)).collect();
                worst = worst.min(seiringer_gap(&g, &vecs)?.gap);
            }
            let _ = writeln!(out, "min_gap={worst:e}");
            let mut counts_ok = true;
            for m in 1..=12 {
                for n in 0..=m / 4 {
                    let o = overlap_count(m, n)?;
                    counts_ok &= o.exact <= o.bound1;
                }
            }
            let _ = writeln!(out, "overlap_counts_ok={counts_ok}\nentropy_constant={:e}", fitted_entropy_constant());
            verification(worst >= -cli.tol && counts_ok, "entropy check failed")?;
        }
        Command::LatticeCheck => {
            let gauss = |p: f64| (-p * p).exp();
            let bose = |p: f64| 1.0 / (p * p).exp_m1();
            let poly = |p: f64| (1.0 + p * p).powi(-3);
            let profiles = [
                RadialFunction { name: "gauss", f: &gauss, singular_at_origin: false, tail_radius: 7.0 },
                RadialFunction { name: "bose", f: &bose, singular_at_origin: true, tail_radius: 7.0 },
                RadialFunction { name: "poly", f: &poly, singular_at_origin: false, tail_radius: 50.0 },
            ];
            let _ = writeln!(out, "profile,L,kappa,lower,sum,upper,holds");
            let mut all = true;
            for rf in &profiles {
                for side in [4.0, 8.0, 16.0, 32.0, 64.0] {
                    for kappa in [0.0, 2.0 * PI] {
                        let s = lattice_sum_sandwich(rf, side, kappa)?;
                        all &= s.holds();
                        let _ = writeln!(out, "{},{side},{kappa:.6},{:.16e},{:.16e},{:.16e},{}", rf.name, s.lower, s.exact_sum, s.upper, s.holds());
                    }
                }
            }
            verification(all, "sandwich violated")?;
        }
        Command::Bound(a) => match a.n {
            None => {
                let r = theorem_bound(a.beta, a.rho, a.a, a.c)?;
                let _ = writeln!(out, "f0={:.16e}\nrho_c={:.16e}\ninteraction={:.16e}\nerror_budget={:.16e}\ntotal={:.16e}\nregime={}", r.f0, r.rho_c, r.interaction, r.error_budget, r.total, r.regime);
            }
            Some(n) => {
                let r = finite_volume_bound(a.beta, n, a.kappa, a.a, a.c, a.eps, a.delta1)?;
                let _ = writeln!(out, "F0={:.16e}\nn0_id={:.16e}\ninteraction={:.16e}\nerror_term={:.16e}\ntotal={:.16e}\nregime={}", r.big_f0, r.n0_id, r.interaction, r.error_term, r.total, r.regime);
            }
        },
        Command::Sweep => {
            let cfg = SweepConfig::parse(&read_config(cli)?)?;
            out.push_str(&sweep_csv(&cfg)?);
        }
        Command::Exponents => {
            let s = exponent_optimize()?;
            let _ = writeln!(out, "gamma={}\neps={}\ndelta1={}\nmin_value={}", s.gamma, s.eps, s.delta1, s.min_value);
        }
    }
    Ok(())
}

fn emit(dest: &str, text: &str) -> Result<()> {
    if dest == "-" {
        std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Resource(e.to_string()))
    } else {
        std::fs::write(dest, text).map_err(|e| Error::Resource(format!("{dest}: {e}")))
    }
}

fn main() {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    let mut out = String::new();
    let status = run(&cli, &mut out);
    if let Err(e) = emit(&cli.out, &out) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    if let Err(e) = status {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
