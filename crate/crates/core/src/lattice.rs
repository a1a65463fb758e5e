//! Integer lattice bookkeeping: shell multiplicities r3(n) = #{k in Z^3 : |k|^2 = n}
//! and certified Gaussian tails.

use std::f64::consts::PI;

pub type Mom = [i64; 3];

pub fn norm2(k: &Mom) -> i64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

pub fn add(a: &Mom, b: &Mom) -> Mom {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &Mom, b: &Mom) -> Mom {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn neg(a: &Mom) -> Mom {
    [-a[0], -a[1], -a[2]]
}

pub fn dot(a: &Mom, b: &Mom) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub const ZERO: Mom = [0, 0, 0];

/// r3(n) for 0 <= n <= n_max by direct enumeration.
pub fn shell_counts(n_max: u64) -> Vec<u64> {
    let mut counts = vec![0u64; n_max as usize + 1];
    let r = (n_max as f64).sqrt().floor() as i64 + 1;
    for x in 0..=r {
        let x2 = x * x;
        if x2 as u64 > n_max {
            break;
        }
        let mx = if x == 0 { 1 } else { 2 };
        for y in 0..=r {
            let xy = x2 + y * y;
            if xy as u64 > n_max {
                break;
            }
            let my = if y == 0 { 1 } else { 2 };
            for z in 0..=r {
                let n = xy + z * z;
                if n as u64 > n_max {
                    break;
                }
                let mz = if z == 0 { 1 } else { 2 };
                counts[n as usize] += mx * my * mz;
            }
        }
    }
    counts
}

/// All lattice vectors with n_min <= |k|^2 <= n_max, sorted lexicographically.
pub fn vectors_in_shell(n_min: i64, n_max: i64) -> Vec<Mom> {
    let r = (n_max as f64).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                let n = x * x + y * y + z * z;
                if n >= n_min && n <= n_max {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// Upper bound for sum_{k in Z^3, |k| >= R} e^{-a |k|^2}, via the integral over
/// |x| >= R - sqrt(3) (each lattice point dominates a unit cube further out).
pub fn gaussian_tail_bound(a: f64, r: f64) -> f64 {
    let c = (r - 3f64.sqrt()).max(0.0);
    // 4 pi int_c^inf x^2 e^{-a x^2} dx
    let erfc = statrs::function::erf::erfc(c * a.sqrt());
    4.0 * PI * (c * (-a * c * c).exp() / (2.0 * a) + PI.sqrt() / (4.0 * a.powf(1.5)) * erfc)
}

/// Smallest integer n_max with the Gaussian tail beyond sqrt(n_max) below `tol`.
pub fn gaussian_cutoff(a: f64, tol: f64) -> u64 {
    let mut n = 1u64;
    while gaussian_tail_bound(a, (n as f64).sqrt()) > tol {
        n = (n as f64 * 1.25).ceil() as u64 + 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_shell_counts() {
        let c = shell_counts(6);
        assert_eq!(c, vec![1, 6, 12, 8, 6, 24, 24]);
    }

    #[test]
    fn shell_counts_match_enumeration() {
        let c = shell_counts(30);
        let total: u64 = c.iter().sum();
        assert_eq!(total as usize, vectors_in_shell(0, 30).len());
    }

    #[test]
    fn tail_bound_dominates() {
        let a = 0.3;
        let r2 = 20i64;
        let exact: f64 = vectors_in_shell(r2, 2000)
            .iter()
            .map(|k| (-a * norm2(k) as f64).exp())
            .sum();
        assert!(exact <= gaussian_tail_bound(a, (r2 as f64).sqrt()));
    }
}
