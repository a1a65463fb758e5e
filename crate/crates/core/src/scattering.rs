//! Zero-energy scattering, the Neumann problem on a ball, and the correlation
//! coefficients eta_p.
//!
//! Radial equations are integrated in u = r f with fixed-step RK4 on a grid that
//! has a node at the support radius of V. Outside the support V is dropped.

use crate::error::{domain, Error, Result};
use crate::lattice::{norm2, shell_counts, Mom};
use crate::shells::MomentumShells;
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialShape {
    Zero,
    /// V0 for r <= R0.
    SquareBarrier { v0: f64, r0: f64 },
    /// V0 exp(1 - 1/(1 - (r/R0)^2)) for r < R0.
    SmoothBump { v0: f64, r0: f64 },
    /// Linear interpolation of (r, V) pairs, zero past the last node.
    Tabulated { r: Vec<f64>, v: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub shape: PotentialShape,
}

impl Potential {
    pub fn zero() -> Self {
        Self { shape: PotentialShape::Zero }
    }

    pub fn square_barrier(v0: f64, r0: f64) -> Result<Self> {
        check_height_radius(v0, r0)?;
        Ok(Self { shape: PotentialShape::SquareBarrier { v0, r0 } })
    }

    pub fn smooth_bump(v0: f64, r0: f64) -> Result<Self> {
        check_height_radius(v0, r0)?;
        Ok(Self { shape: PotentialShape::SmoothBump { v0, r0 } })
    }

    pub fn tabulated(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.len() != v.len() || r.len() < 2 {
            return domain("tabulated potential needs at least two (r, V) pairs of equal length");
        }
        if r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("tabulated radii must be nonnegative and strictly increasing");
        }
        if v.iter().any(|x| !x.is_finite()) {
            return domain("hard-core (infinite) potentials are not supported");
        }
        if v.iter().any(|&x| x < 0.0) {
            return domain("potential must be nonnegative");
        }
        Ok(Self { shape: PotentialShape::Tabulated { r, v } })
    }

    pub fn support_radius(&self) -> f64 {
        match &self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::SquareBarrier { r0, .. } | PotentialShape::SmoothBump { r0, .. } => *r0,
            PotentialShape::Tabulated { r, v } => {
                // last radius where the interpolant is nonzero
                match v.iter().rposition(|&x| x > 0.0) {
                    None => 0.0,
                    Some(i) if i + 1 < r.len() => r[i + 1],
                    Some(i) => r[i],
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support_radius() == 0.0
    }

    /// V(r) on the closed support interval [0, R0].
    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::SquareBarrier { v0, r0 } => {
                if x <= *r0 {
                    *v0
                } else {
                    0.0
                }
            }
            PotentialShape::SmoothBump { v0, r0 } => {
                let t = x / r0;
                if t < 1.0 {
                    v0 * (1.0 - 1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
            PotentialShape::Tabulated { r, v } => {
                if x <= r[0] {
                    return v[0];
                }
                if x > r[r.len() - 1] {
                    return 0.0;
                }
                let i = r.partition_point(|&ri| ri < x).max(1);
                let t = (x - r[i - 1]) / (r[i] - r[i - 1]);
                v[i - 1] + t * (v[i] - v[i - 1])
            }
        }
    }

    /// V-hat(k) = 4 pi int V(r) r^2 sinc(k r) dr by Simpson on 2^steps_exp steps.
    pub fn fourier(&self, k: f64, steps_exp: u32) -> f64 {
        let r0 = self.support_radius();
        if r0 == 0.0 {
            return 0.0;
        }
        let n = 1usize << steps_exp;
        let h = r0 / n as f64;
        let g: Vec<f64> = (0..=n).map(|i| self.eval(i as f64 * h)).collect();
        4.0 * PI * radial_sine_transform(&g, 0.0, h, k)
    }

    /// int |x|<=R0 V^3 dx, finite for every bounded shape.
    pub fn cube_integral(&self) -> f64 {
        let r0 = self.support_radius();
        if r0 == 0.0 {
            return 0.0;
        }
        let n = 4096;
        let h = r0 / n as f64;
        let g: Vec<f64> = (0..=n).map(|i| self.eval(i as f64 * h).powi(3)).collect();
        4.0 * PI * radial_sine_transform(&g, 0.0, h, 0.0)
    }
}

fn check_height_radius(v0: f64, r0: f64) -> Result<()> {
    if !v0.is_finite() {
        return domain("hard-core (infinite) potentials are not supported");
    }
    if !(v0 >= 0.0) || !(r0 > 0.0) {
        return domain(format!("need V0 >= 0 and R0 > 0, got V0={v0}, R0={r0}"));
    }
    Ok(())
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// int g(r) r^2 sinc(k r) dr over r_j = start + j h, j = 0..=n (n even), by
/// Simpson. Uses g r sin(k r) / k with sines advanced by rotation and reseeded
/// every 256 nodes.
pub fn radial_sine_transform(g: &[f64], start: f64, h: f64, k: f64) -> f64 {
    let n = g.len() - 1;
    debug_assert!(n % 2 == 0);
    let r_max = start + n as f64 * h;
    let mut acc = 0.0;
    if k * r_max < 1e-4 {
        for (j, gj) in g.iter().enumerate() {
            let r = start + j as f64 * h;
            acc += simpson_weight(j, n) * gj * r * r * crate::numerics::sinc(k * r);
        }
        return acc * h / 3.0;
    }
    let (sh, ch) = (k * h).sin_cos();
    let (mut s, mut c) = (0.0, 0.0);
    for (j, gj) in g.iter().enumerate() {
        let r = start + j as f64 * h;
        if j % 256 == 0 {
            (s, c) = (k * r).sin_cos();
        } else {
            let s_new = s * ch + c * sh;
            c = c * ch - s * sh;
            s = s_new;
        }
        acc += simpson_weight(j, n) * gj * r * s;
    }
    acc * h / (3.0 * k)
}

/// Two-piece uniform grid: [0, R0] and [R0, R].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid {
    pub r0: f64,
    pub radius: f64,
    pub n1: usize,
    pub n2: usize,
}

impl RadialGrid {
    /// About 2^steps_exp steps in total, split in proportion to length.
    pub fn new(r0: f64, radius: f64, steps_exp: u32) -> Self {
        let total = (1usize << steps_exp) as f64;
        let even = |x: f64, min: usize| (2 * ((0.5 * x).ceil() as usize)).max(min);
        let n1 = if r0 > 0.0 { even(total * r0 / radius, 1024) } else { 0 };
        let n2 = if radius > r0 { even(total * (radius - r0) / radius, 2) } else { 0 };
        Self { r0, radius, n1, n2 }
    }
    pub fn h1(&self) -> f64 {
        if self.n1 == 0 {
            0.0
        } else {
            self.r0 / self.n1 as f64
        }
    }
    pub fn h2(&self) -> f64 {
        if self.n2 == 0 {
            0.0
        } else {
            (self.radius - self.r0) / self.n2 as f64
        }
    }
    pub fn len(&self) -> usize {
        self.n1 + self.n2 + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn node(&self, i: usize) -> f64 {
        if i <= self.n1 {
            i as f64 * self.h1()
        } else {
            self.r0 + (i - self.n1) as f64 * self.h2()
        }
    }
}

/// u'' = (V/2 - lambda) u with u(0) = 0, u'(0) = 1. V is used only on the first piece.
fn shoot(pot: &Potential, lambda: f64, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(grid.len());
    let mut du = Vec::with_capacity(grid.len());
    let (mut y, mut dy) = (0.0f64, 1.0f64);
    u.push(y);
    du.push(dy);
    let step = |r: f64, h: f64, inside: bool, y: &mut f64, dy: &mut f64| {
        let q = |x: f64| if inside { 0.5 * pot.eval(x) - lambda } else { -lambda };
        let (qa, qm, qb) = (q(r), q(r + 0.5 * h), q(r + h));
        let k1 = (*dy, qa * *y);
        let k2 = (*dy + 0.5 * h * k1.1, qm * (*y + 0.5 * h * k1.0));
        let k3 = (*dy + 0.5 * h * k2.1, qm * (*y + 0.5 * h * k2.0));
        let k4 = (*dy + h * k3.1, qb * (*y + h * k3.0));
        *y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        *dy += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    };
    let h1 = grid.h1();
    for i in 0..grid.n1 {
        step(i as f64 * h1, h1, true, &mut y, &mut dy);
        u.push(y);
        du.push(dy);
    }
    let h2 = grid.h2();
    for j in 0..grid.n2 {
        step(grid.r0 + j as f64 * h2, h2, false, &mut y, &mut dy);
        u.push(y);
        du.push(dy);
    }
    (u, du)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringLength {
    pub a: f64,
    /// Slope c of the exterior solution u = c (r - a).
    pub slope: f64,
    /// Linear-fit residual on [R0, R0 + 1] divided by |c|.
    pub fit_residual: f64,
    /// |a(h) - a(h/2)| / 15.
    pub richardson: f64,
}

fn scattering_length_at(pot: &Potential, steps_exp: u32) -> (f64, f64, f64) {
    let r0 = pot.support_radius();
    let grid = RadialGrid::new(r0, r0 + 1.0, steps_exp);
    let (u, _) = shoot(pot, 0.0, &grid);
    // two-point fit through r0 + 1/2 and r0 + 1, residual at r0
    let i_half = grid.n1 + grid.n2 / 2;
    let i_end = grid.len() - 1;
    let (ra, rb) = (grid.node(i_half), grid.node(i_end));
    let c = (u[i_end] - u[i_half]) / (rb - ra);
    let a = rb - u[i_end] / c;
    let resid = (u[grid.n1] - c * (r0 - a)).abs() / c.abs();
    (a, c, resid)
}

/// Scattering length from the exterior tail of the zero-energy solution.
pub fn scattering_length(pot: &Potential) -> Result<ScatteringLength> {
    if pot.is_zero() {
        return Ok(ScatteringLength { a: 0.0, slope: 1.0, fit_residual: 0.0, richardson: 0.0 });
    }
    let (a, c, resid) = scattering_length_at(pot, 14);
    let (a2, _, _) = scattering_length_at(pot, 15);
    if !a.is_finite() || !c.is_finite() || c <= 0.0 {
        return Err(Error::Numeric(format!(
            "zero-energy integration failed: slope {c}, a {a}, step {}",
            RadialGrid::new(pot.support_radius(), pot.support_radius() + 1.0, 14).h1()
        )));
    }
    if resid > 1e-10 {
        return Err(Error::Numeric(format!("exterior fit residual {resid:e} exceeds 1e-10")));
    }
    Ok(ScatteringLength { a: a2, slope: c, fit_residual: resid, richardson: (a - a2).abs() / 15.0 })
}

/// Closed form for the square barrier: R0 - tanh(k R0)/k with k = sqrt(V0/2).
pub fn square_barrier_length(v0: f64, r0: f64) -> f64 {
    if v0 == 0.0 {
        return 0.0;
    }
    let k = (0.5 * v0).sqrt();
    r0 - (k * r0).tanh() / k
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringSolution {
    pub a: f64,
    pub lambda_ell: f64,
    pub ell: f64,
    pub n: f64,
    pub kappa: f64,
    pub grid: RadialGrid,
    /// f_ell at the grid nodes, f = 1 at the outer radius.
    pub f: Vec<f64>,
    /// V at the nodes of the inner piece.
    pub v_nodes: Vec<f64>,
}

impl ScatteringSolution {
    /// N^{1-kappa}
    pub fn scale(&self) -> f64 {
        self.n.powf(1.0 - self.kappa)
    }

    /// int V f_ell over the ball (unscaled variables).
    pub fn int_v_f(&self) -> f64 {
        let g: Vec<f64> = (0..=self.grid.n1).map(|i| self.v_nodes[i] * self.f[i]).collect();
        if self.grid.n1 == 0 {
            return 0.0;
        }
        4.0 * PI * radial_sine_transform(&g, 0.0, self.grid.h1(), 0.0)
    }

    /// 4 pi int_0^R g(f(r), i) r^2 sinc(k r) dr over both pieces.
    fn transform(&self, k: f64, inner_only: bool, g: impl Fn(usize) -> f64) -> f64 {
        let mut total = 0.0;
        if self.grid.n1 > 0 {
            let v: Vec<f64> = (0..=self.grid.n1).map(&g).collect();
            total += radial_sine_transform(&v, 0.0, self.grid.h1(), k);
        }
        if !inner_only && self.grid.n2 > 0 {
            let v: Vec<f64> = (self.grid.n1..self.grid.len()).map(&g).collect();
            total += radial_sine_transform(&v, self.grid.r0, self.grid.h2(), k);
        }
        4.0 * PI * total
    }

    /// eta at physical momentum |p|: -N (4 pi / X^3) int_0^R (1 - f) r^2 sinc(|p| r / X) dr.
    pub fn eta_at(&self, p: f64) -> f64 {
        let x = self.scale();
        -self.n * self.transform(p / x, false, |i| 1.0 - self.f[i]) / x.powi(3)
    }

    /// Fourier transform of V_N f_{N,ell} at |p|, with V_N(x) = N^{2-2 kappa} V(N^{1-kappa} x).
    pub fn vf_hat(&self, p: f64) -> f64 {
        let x = self.scale();
        self.n.powf(2.0 - 2.0 * self.kappa) * self.transform(p / x, true, |i| self.v_nodes[i] * self.f[i])
            / x.powi(3)
    }

    /// Fourier transform of V_N (1 - f_{N,ell}) at |p|. Equals -(V_N-hat * eta)(p) / N
    /// with the convolution over the whole dual lattice.
    pub fn vw_hat(&self, p: f64) -> f64 {
        let x = self.scale();
        self.n.powf(2.0 - 2.0 * self.kappa) * self.transform(p / x, true, |i| self.v_nodes[i] * (1.0 - self.f[i]))
            / x.powi(3)
    }

    /// Fourier transform of chi_ell f_{N,ell} at |p|.
    pub fn chi_f_hat(&self, p: f64) -> f64 {
        let x = self.scale();
        self.transform(p / x, false, |i| self.f[i]) / x.powi(3)
    }
}

fn neumann_mismatch(pot: &Potential, lambda: f64, grid: &RadialGrid) -> f64 {
    let (u, du) = shoot(pot, lambda, grid);
    let last = grid.len() - 1;
    grid.radius * du[last] - u[last]
}

/// Lowest Neumann eigenpair of -Delta + V/2 on |x| <= N^{1-kappa} ell with f = 1 on the sphere.
pub fn solve_neumann(pot: &Potential, ell: f64, n: f64, kappa: f64) -> Result<ScatteringSolution> {
    solve_neumann_with(pot, ell, n, kappa, 14)
}

pub fn solve_neumann_with(pot: &Potential, ell: f64, n: f64, kappa: f64, steps_exp: u32) -> Result<ScatteringSolution> {
    if !(ell > 0.0 && ell < 0.5) {
        return domain(format!("ell must lie in (0, 1/2), got {ell}"));
    }
    if !(n >= 1.0) {
        return domain(format!("N must be at least 1, got {n}"));
    }
    let radius = n.powf(1.0 - kappa) * ell;
    let r0 = pot.support_radius();
    if !(radius > r0) {
        return domain(format!("ball radius N^(1-kappa) ell = {radius} does not exceed the support {r0}"));
    }
    let grid = RadialGrid::new(r0, radius, steps_exp);
    if pot.is_zero() {
        return Ok(ScatteringSolution {
            a: 0.0,
            lambda_ell: 0.0,
            ell,
            n,
            kappa,
            grid,
            f: vec![1.0; grid.len()],
            v_nodes: vec![0.0; grid.n1 + 1],
        });
    }
    let a = scattering_length(pot)?.a;
    let mm = |l: f64| neumann_mismatch(pot, l, &grid);
    let (mut lo, mut f_lo) = (0.0, mm(0.0));
    if !(f_lo > 0.0) {
        return Err(Error::Numeric(format!("boundary mismatch at lambda = 0 is {f_lo}, expected positive")));
    }
    let mut hi = 3.0 * a / radius.powi(3);
    let mut f_hi = mm(hi);
    let mut tries = 0;
    while f_hi > 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = mm(hi);
        tries += 1;
        if tries > 200 {
            return Err(Error::Numeric("no sign change in the shooting bracket".into()));
        }
    }
    // Illinois regula falsi
    let mut side = 0i32;
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = mm(x);
        if fx == 0.0 {
            lo = x;
            hi = x;
            break;
        }
        if fx > 0.0 {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let (u, du) = shoot(pot, lambda, &grid);
    let last = grid.len() - 1;
    let norm = radius / u[last];
    let mut f = Vec::with_capacity(grid.len());
    f.push(du[0] * norm);
    for (i, ui) in u.iter().enumerate().skip(1) {
        f.push(ui * norm / grid.node(i));
    }
    if f.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Numeric("shooting converged to an eigenfunction with a node".into()));
    }
    let v_nodes: Vec<f64> = (0..=grid.n1).map(|i| pot.eval(grid.node(i))).collect();
    Ok(ScatteringSolution { a, lambda_ell: lambda, ell, n, kappa, grid, f, v_nodes })
}

/// eta_p on shells |k|^2 = n <= n_cut (p = 2 pi k). Radial, so stored per shell.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaField {
    /// values[n] = eta at |p| = 2 pi sqrt(n); NaN on empty shells.
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
}

impl EtaField {
    pub fn n_cut(&self) -> i64 {
        self.values.len() as i64 - 1
    }

    pub fn get(&self, k: &Mom) -> Option<f64> {
        self.values.get(norm2(k) as usize).copied()
    }
}

/// eta_p for all lattice momenta with |p| <= lattice_cut.
pub fn eta_coefficients(sol: &ScatteringSolution, lattice_cut: f64) -> Result<EtaField> {
    if !(sol.ell < 0.5) {
        return domain("ell >= 1/2: the correlation does not fit in the unit torus");
    }
    let n_cut = ((lattice_cut / (2.0 * PI)).powi(2)).floor() as u64;
    if n_cut > 5_000_000 {
        return Err(Error::Config(format!("eta lattice cutoff |k|^2 <= {n_cut} too large")));
    }
    let counts = shell_counts(n_cut);
    let values = counts
        .iter()
        .enumerate()
        .map(|(n, &c)| if c == 0 { f64::NAN } else { sol.eta_at(2.0 * PI * (n as f64).sqrt()) })
        .collect();
    Ok(EtaField { values, counts })
}

/// Largest relative residual of p^2 eta_p + (N/2)(V_N f)^(p) - N^{3-2 kappa} lambda (chi f)^(p)
/// over the shells of `eta`.
pub fn scattering_identity_residual(eta: &EtaField, sol: &ScatteringSolution) -> f64 {
    if sol.lambda_ell == 0.0 && sol.v_nodes.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let c = sol.n.powf(3.0 - 2.0 * sol.kappa) * sol.lambda_ell;
    let mut worst: f64 = 0.0;
    for (n, (&e, &cnt)) in eta.values.iter().zip(&eta.counts).enumerate() {
        if cnt == 0 {
            continue;
        }
        let p = 2.0 * PI * (n as f64).sqrt();
        let t1 = p * p * e;
        let t2 = 0.5 * sol.n * sol.vf_hat(p);
        let t3 = c * sol.chi_f_hat(p);
        let scale = t1.abs().max(t2.abs()).max(t3.abs());
        if scale > 0.0 {
            worst = worst.max((t1 + t2 - t3).abs() / scale);
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaNorms {
    pub l1: f64,
    pub l2_sq: f64,
    pub linf: f64,
    /// sum over P_H of (1 + p^2) eta_p^2
    pub h1_sq: f64,
}

/// Norms of eta restricted to P_H, truncated at the cutoff of `eta`.
pub fn eta_norms(eta: &EtaField, shells: &MomentumShells) -> EtaNorms {
    let mut out = EtaNorms { l1: 0.0, l2_sq: 0.0, linf: 0.0, h1_sq: 0.0 };
    let mut add = |e: f64, n: i64, weight: f64| {
        let p2 = 4.0 * PI * PI * n as f64;
        out.l1 += weight * e.abs();
        out.l2_sq += weight * e * e;
        out.linf = out.linf.max(e.abs());
        out.h1_sq += weight * (1.0 + p2) * e * e;
    };
    if shells.params.is_some() {
        for (n, (&e, &c)) in eta.values.iter().zip(&eta.counts).enumerate() {
            let rep = [n as i64, 0, 0];
            // membership of physical P_H depends on |k|^2 only; test a vector of that norm
            if c > 0 && shells.in_ph(&norm_representative(n as i64).unwrap_or(rep)) {
                add(e, n as i64, c as f64);
            }
        }
    } else {
        for k in &shells.ph {
            if let Some(e) = eta.get(k) {
                add(e, norm2(k), 1.0);
            }
        }
    }
    out
}

pub(crate) fn norm_representative(n: i64) -> Option<Mom> {
    let m = (n as f64).sqrt() as i64 + 1;
    for x in 0..=m {
        for y in 0..=x {
            let rest = n - x * x - y * y;
            if rest < 0 {
                break;
            }
            let z = (rest as f64).sqrt().round() as i64;
            if z * z == rest {
                return Some([x, y, z]);
            }
        }
    }
    None
}

/// sup over `probes` of sum_{r != 0, |r| <= cut} [|(V_N f)^(r - p)| + |V_N-hat(r - p)|] / r^2.
pub fn bcs_sup_sum(sol: &ScatteringSolution, pot: &Potential, probes: &[Mom], lattice_cut: f64) -> f64 {
    let kc = (lattice_cut / (2.0 * PI)).floor() as i64;
    let kp = probes.iter().map(|p| (norm2(p) as f64).sqrt().ceil() as i64).max().unwrap_or(0);
    let n_tab = ((kc + kp) * (kc + kp) * 3) as usize;
    let x = sol.scale();
    let vn = sol.n.powf(sol.kappa - 1.0);
    let mut vf = vec![f64::NAN; n_tab + 1];
    let mut vh = vec![f64::NAN; n_tab + 1];
    let mut sup: f64 = 0.0;
    for p in probes {
        let mut acc = 0.0;
        for a in -kc..=kc {
            for b in -kc..=kc {
                for c in -kc..=kc {
                    let r = [a, b, c];
                    let nr = norm2(&r);
                    if nr == 0 || nr > kc * kc {
                        continue;
                    }
                    let d = [a - p[0], b - p[1], c - p[2]];
                    let nd = norm2(&d) as usize;
                    if vf[nd].is_nan() {
                        let q = 2.0 * PI * (nd as f64).sqrt();
                        vf[nd] = sol.vf_hat(q).abs();
                        vh[nd] = (vn * pot.fourier(q / x, 12)).abs();
                    }
                    acc += (vf[nd] + vh[nd]) / (4.0 * PI * PI * nr as f64);
                }
            }
        }
        sup = sup.max(acc);
    }
    sup
}
