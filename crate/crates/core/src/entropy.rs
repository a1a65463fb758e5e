//! Entropy of dressed Gibbs-type states: the rank-one projection inequality
//! S(G_hat) >= S(G) - ln Tr(sum_a P_a G_hat), and the count of fermionic
//! depletion patterns that bounds the overlap sum.

use crate::error::{domain, Result};
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex<f64>>;
pub type CVector = DVector<Complex<f64>>;

const EIGEN_FLOOR: f64 = 1e-15;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Von Neumann entropy, with eigenvalues below 1e-15 treated as zero.
pub fn von_neumann_entropy(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).into_iter().filter(|&l| l > EIGEN_FLOOR).map(|l| -l * l.ln()).sum()
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return domain("density matrix must be square");
        }
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > 1e-12 {
            return domain(format!("matrix is not Hermitian (defect {herm:e})"));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > 1e-12 {
            return domain(format!("trace {tr} differs from 1"));
        }
        if hermitian_eigenvalues(&matrix).first().is_some_and(|&l| l < -1e-12) {
            return domain("matrix has a negative eigenvalue");
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues and orthonormal eigenvectors.
    pub fn spectrum(&self) -> (Vec<f64>, Vec<CVector>) {
        let e = self.matrix.clone().symmetric_eigen();
        let vals = e.eigenvalues.iter().copied().collect();
        let vecs = (0..self.dim()).map(|i| e.eigenvectors.column(i).into_owned()).collect();
        (vals, vecs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeiringerGap {
    pub entropy_hat: f64,
    pub entropy: f64,
    pub log_trace: f64,
    /// S(G_hat) - S(G) + ln Tr(sum_a P_a G_hat); the inequality says >= 0.
    pub gap: f64,
}

/// Pairs the eigenvalues of `gamma` (in the order of its eigendecomposition)
/// with the rank-one projections onto `vectors`, which need not be orthogonal.
pub fn seiringer_gap(gamma: &DensityMatrix, vectors: &[CVector]) -> Result<SeiringerGap> {
    let d = gamma.dim();
    if vectors.len() != d {
        return domain(format!("need {d} projections, got {}", vectors.len()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return domain(format!("projection vector of length {} in dimension {d}", v.len()));
    }
    let (vals, _) = gamma.spectrum();
    let units: Vec<CVector> = vectors.iter().map(|v| v.normalize()).collect();
    let mut hat = CMatrix::zeros(d, d);
    let mut sum_p = CMatrix::zeros(d, d);
    for (l, v) in vals.iter().zip(&units) {
        let p = v * v.adjoint();
        hat += &p * Complex::new(*l, 0.0);
        sum_p += p;
    }
    let entropy_hat = von_neumann_entropy(&hat);
    let entropy = von_neumann_entropy(&gamma.matrix);
    let log_trace = (sum_p * &hat).trace().re.ln();
    Ok(SeiringerGap { entropy_hat, entropy, log_trace, gap: entropy_hat - entropy + log_trace })
}

fn gaussian_vector<R: Rng>(d: usize, rng: &mut R) -> CVector {
    CVector::from_fn(d, |_, _| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// A random unit vector, uniform on the complex sphere.
pub fn haar_vector<R: Rng>(d: usize, rng: &mut R) -> CVector {
    gaussian_vector(d, rng).normalize()
}

/// G G^* / Tr for a complex Gaussian G.
pub fn random_density_matrix<R: Rng>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let m = &m / m.trace();
    let m = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
    DensityMatrix { matrix: m }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapCount {
    pub exact: u128,
    pub bound1: u128,
    /// (2n+1)^2 (m/(m-2n))^{2(m-2n)} (m/2n)^{4n}, without its constant.
    pub bound2: f64,
}

impl OverlapCount {
    /// bound1 / bound2: the constant the Stirling form needs here.
    pub fn stirling_constant(&self) -> f64 {
        self.bound1 as f64 / self.bound2
    }
}

/// Number of ways to deplete at most 2 n_c of pa_size singly-occupiable
/// levels, squared, counted by enumerating subsets.
pub fn overlap_count(pa_size: usize, n_c: usize) -> Result<OverlapCount> {
    if pa_size > 12 {
        return domain(format!("pa_size = {pa_size} above the enumeration limit 12"));
    }
    if 4 * n_c > pa_size {
        return domain(format!("need 4 n_c <= |P_A|, got n_c = {n_c}, |P_A| = {pa_size}"));
    }
    let k_max = 2 * n_c as u32;
    let configs = (0u32..1 << pa_size).filter(|mask| mask.count_ones() <= k_max).count() as u128;
    let (m, n2) = (pa_size as u64, 2 * n_c as u64);
    let b1 = (n2 as u128 + 1) * binomial(m, n2);
    let (mf, nf) = (m as f64, n2 as f64);
    let mid = if n2 == m { 1.0 } else { (mf / (mf - nf)).powf(2.0 * (mf - nf)) };
    let tail = if n2 == 0 { 1.0 } else { (mf / nf).powf(2.0 * nf) };
    Ok(OverlapCount { exact: configs * configs, bound1: b1 * b1, bound2: (nf + 1.0).powi(2) * mid * tail })
}

/// -C (1 + n_c (1 + ln |P_A|)).
pub fn entropy_lower_bound_rhs(n_c: usize, pa_size: usize, c: f64) -> f64 {
    -c * (1.0 + n_c as f64 * (1.0 + (pa_size as f64).ln()))
}

/// Smallest C with ln(bound1) <= C (1 + n_c (1 + ln |P_A|)) over all
/// admissible (|P_A| <= 12, n_c).
pub fn fitted_entropy_constant() -> f64 {
    let mut c: f64 = 0.0;
    for m in 1..=12usize {
        for n in 0..=m / 4 {
            let o = overlap_count(m, n).expect("admissible");
            c = c.max((o.bound1 as f64).ln() / (1.0 + n as f64 * (1.0 + (m as f64).ln())));
        }
    }
    c
}
