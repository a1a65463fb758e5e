//! Small numerical kernels: compensated summation, zeta and polylogarithm of
//! real order, bisection, and a subdividing wrapper around tanh-sinh quadrature.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Kahan-Babuska (Neumaier) compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut k = KahanSum::new();
    for x in it {
        k.add(x);
    }
    k.value()
}

/// Pairwise summation in slice order. The result depends only on the slice,
/// never on thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return kahan_sum(xs.iter().copied());
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

pub const ZETA_3_2: f64 = 2.612_375_348_685_488_3;
pub const ZETA_5_2: f64 = 1.341_487_257_250_917_2;

/// Gamma function on the whole real line except the poles.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * statrs::function::gamma::gamma(1.0 - x))
    } else {
        statrs::function::gamma::gamma(x)
    }
}

/// Riemann zeta for real s != 1. Euler-Maclaurin for s >= 0 and the
/// functional equation below that.
pub fn zeta(s: f64) -> f64 {
    if s < 0.0 {
        let r = 1.0 - s;
        return 2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma(r) * zeta(r);
    }
    let n = 16usize;
    let nf = n as f64;
    let mut acc = KahanSum::new();
    for k in 1..n {
        acc.add((k as f64).powf(-s));
    }
    acc.add(nf.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * nf.powf(-s));
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    let mut poch = s;
    let mut fact = 2.0;
    let mut npow = nf.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let jj = (j + 1) as f64;
        acc.add(b / fact * poch * npow);
        poch *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        npow /= nf * nf;
    }
    acc.value()
}

/// Direct series sum_{k>=1} e^{-kt} k^{-s} for t > 0.
pub fn polylog_exp_series(s: f64, t: f64) -> f64 {
    let z = (-t).exp();
    let mut acc = KahanSum::new();
    let mut zk = z;
    for k in 1..1_000_000u64 {
        let term = zk / (k as f64).powf(s);
        acc.add(term);
        if term < 1e-17 * acc.value() {
            break;
        }
        zk *= z;
    }
    acc.value()
}

/// Expansion around z = 1:
/// Li_s(e^{-t}) = Gamma(1-s) t^{s-1} + sum_k zeta(s-k) (-t)^k / k!, valid for t < 2 pi.
pub fn polylog_exp_near_one(s: f64, t: f64) -> f64 {
    let mut acc = KahanSum::new();
    acc.add(gamma(1.0 - s) * t.powf(s - 1.0));
    let mut tk = 1.0;
    let mut kfact = 1.0;
    for k in 0..60u32 {
        let term = zeta(s - k as f64) * tk / kfact;
        acc.add(term);
        if k > 2 && term.abs() < 1e-18 * acc.value().abs() {
            break;
        }
        tk *= -t;
        kfact *= (k + 1) as f64;
    }
    acc.value()
}

/// Li_s(e^{-t}) for t >= 0 and non-integer s > 0 (s > 1 when t = 0).
pub fn polylog_exp(s: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() && t != f64::INFINITY {
        return Err(Error::Domain(format!("polylog argument exponent t = {t} must be >= 0")));
    }
    if t == f64::INFINITY {
        return Ok(0.0);
    }
    if t == 0.0 {
        if s <= 1.0 {
            return Err(Error::Domain(format!("Li_{s}(1) diverges")));
        }
        return Ok(zeta(s));
    }
    if t >= 1.0 {
        Ok(polylog_exp_series(s, t))
    } else {
        Ok(polylog_exp_near_one(s, t))
    }
}

/// Bisection for an increasing function with f(lo) < 0 < f(hi). Runs until
/// the midpoint coincides with an end point in floating point.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::Numeric(format!(
            "bracket failure: f({lo:e}) = {flo:e}, f({hi:e}) = {fhi:e}"
        )));
    }
    for _ in 0..4000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Integral of f over [a, b] with absolute tolerance `tol`. Splits the range
/// until every piece meets its share of the tolerance.
pub fn integrate<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut total = KahanSum::new();
    integrate_rec(f, a, b, tol, 0, &mut total)?;
    Ok(total.value())
}

fn integrate_rec<F: Fn(f64) -> f64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    total: &mut KahanSum,
) -> Result<()> {
    let out = quadrature::double_exponential::integrate(f, a, b, tol);
    // Pieces are accepted once they reach the requested tolerance or the
    // attainable relative precision, whichever is looser.
    let floor = 64.0 * f64::EPSILON * out.integral.abs();
    if out.error_estimate <= tol.max(floor) {
        total.add(out.integral);
        return Ok(());
    }
    if depth >= 14 {
        return Err(Error::Numeric(format!(
            "quadrature on [{a:e}, {b:e}] stalled with error estimate {:e}",
            out.error_estimate
        )));
    }
    let m = 0.5 * (a + b);
    integrate_rec(f, a, m, 0.5 * tol, depth + 1, total)?;
    integrate_rec(f, m, b, 0.5 * tol, depth + 1, total)
}

/// sin(x)/x, by its Taylor series when |x| < 1e-4.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Least-squares slope of y against x.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
