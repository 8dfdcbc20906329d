//! Wigner rotation matrices for integer `j`.
//!
//! `small_d(j, m, r, beta) = <j m| exp(-i beta J_y) |j r>` (Condon-Shortley
//! phases), and `big_d(j, m, r, (alpha, beta, gamma)) = exp(i(m alpha + r gamma)) d`.
//! With these phases `big_d` represents the rotation built by
//! [`rotation_matrix`](super::rotation_matrix) for the same angle triple.

use num_complex::Complex;

use super::jacobi::jacobi_polynomial;
use super::{check_index, EulerAngles};
use crate::error::Result;
use crate::scalar::Real;

/// Wigner small-d element `d^j_{m r}(beta)`.
pub fn small_d<T: Real>(j: u32, m: i32, r: i32, beta: T) -> Result<T> {
    check_index(j, m)?;
    check_index(j, r)?;
    Ok(small_d_unchecked(j, m, r, beta))
}

/// Wigner big-D element `exp(i(m alpha + r gamma)) d^j_{m r}(beta)`.
pub fn big_d<T: Real>(j: u32, m: i32, r: i32, angles: &EulerAngles<T>) -> Result<Complex<T>> {
    let d = small_d(j, m, r, angles.beta)?;
    Ok(phase(m, r, angles) * d)
}

#[inline]
pub(crate) fn phase<T: Real>(m: i32, r: i32, angles: &EulerAngles<T>) -> Complex<T> {
    let arg = T::from_int(m as i64) * angles.alpha + T::from_int(r as i64) * angles.gamma;
    Complex::new(arg.cos(), arg.sin())
}

/// Jacobi-polynomial form of `d^j_{m r}`, reduced to the case with
/// non-negative Jacobi parameters.
pub(crate) fn small_d_unchecked<T: Real>(j: u32, m: i32, r: i32, beta: T) -> T {
    let (j, m, r) = (j as i64, m as i64, r as i64);
    let k = (j + r).min(j - r).min(j + m).min(j - m);
    let (a, sign_exp) = if k == j + r {
        (m - r, m - r)
    } else if k == j - r || k == j + m {
        (r - m, 0)
    } else {
        (m - r, m - r)
    };
    let b = 2 * j - 2 * k - a;
    debug_assert!(a >= 0 && b >= 0 && k >= 0);

    // sqrt(C(2j - k, k + a) / C(k + b, b)) as a running product
    let ratio = binomial::<T>(2 * j - k, k + a) / binomial::<T>(k + b, b);
    let half = beta / T::lit(2.0);
    let value = ratio.sqrt()
        * half.sin().powi(a as i32)
        * half.cos().powi(b as i32)
        * jacobi_polynomial(k as u32, a as u32, b as u32, beta.cos());
    if sign_exp.rem_euclid(2) == 1 {
        -value
    } else {
        value
    }
}

fn binomial<T: Real>(n: i64, k: i64) -> T {
    let k = k.min(n - k);
    (1..=k).fold(T::one(), |acc, i| acc * T::from_int(n - k + i) / T::from_int(i))
}

/// All `d^j_{m r}(beta)` for `j <= j_max` at a fixed `beta`.
#[derive(Debug, Clone)]
pub struct SmallDTable<T> {
    j_max: u32,
    values: Vec<T>,
}

impl<T: Real> SmallDTable<T> {
    pub fn new(j_max: u32, beta: T) -> Self {
        let mut values = Vec::with_capacity(Self::offset(j_max + 1));
        for j in 0..=j_max {
            let jj = j as i32;
            for m in -jj..=jj {
                for r in -jj..=jj {
                    values.push(small_d_unchecked(j, m, r, beta));
                }
            }
        }
        Self { j_max, values }
    }

    #[inline]
    fn offset(j: u32) -> usize {
        // sum_{i<j} (2i+1)^2 = j(2j-1)(2j+1)/3
        let j = j as usize;
        j * (2 * j + 1) * (2 * j).saturating_sub(1) / 3
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Unchecked lookup; callers guarantee `|m|, |r| <= j <= j_max`.
    #[inline]
    pub fn get(&self, j: u32, m: i32, r: i32) -> T {
        let width = 2 * j as usize + 1;
        let row = (m + j as i32) as usize;
        let col = (r + j as i32) as usize;
        self.values[Self::offset(j) + row * width + col]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    type C64 = Complex<f64>;

    /// exp(-i beta J_y) by diagonalizing J_y; basis ordered m = -j..j.
    fn d_matrix_oracle(j: u32, beta: f64) -> DMatrix<C64> {
        let dim = 2 * j as usize + 1;
        let jf = j as f64;
        let mut jy = DMatrix::<C64>::zeros(dim, dim);
        for col in 0..dim - 1 {
            let m = col as f64 - jf;
            let up = (jf * (jf + 1.0) - m * (m + 1.0)).sqrt();
            // J_y = (J+ - J-)/(2i)
            jy[(col + 1, col)] = C64::new(0.0, -up / 2.0);
            jy[(col, col + 1)] = C64::new(0.0, up / 2.0);
        }
        let eig = jy.symmetric_eigen();
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, -beta * l).exp()));
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }

    #[test]
    fn trivial_representation() {
        for &b in &[0.0, 0.4, 2.0, PI] {
            assert_eq!(small_d(0, 0, 0, b).unwrap(), 1.0);
        }
    }

    #[test]
    fn spin_one_samples() {
        for &b in &[0.0, 0.3, 1.7, 3.0] {
            assert!((small_d(1, 0, 0, b).unwrap() - f64::cos(b)).abs() < 1e-15);
        }
        let v = small_d(1, 1, 0, PI / 2.0).unwrap();
        assert!((v + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(small_d(1, 2, 0, 0.1_f64).is_err());
        assert!(big_d(2, 0, -3, &EulerAngles::new(0.0, 0.1, 0.0)).is_err());
    }

    #[test]
    fn identity_at_zero() {
        for j in 0..=8u32 {
            let jj = j as i32;
            for m in -jj..=jj {
                for r in -jj..=jj {
                    let want = if m == r { 1.0 } else { 0.0 };
                    assert_eq!(small_d(j, m, r, 0.0_f64).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn matches_generator_exponential() {
        for j in 0..=8u32 {
            for &beta in &[0.2, 1.1, 2.5, PI - 1e-3] {
                let oracle = d_matrix_oracle(j, beta);
                let jj = j as i32;
                for m in -jj..=jj {
                    for r in -jj..=jj {
                        let o = oracle[((m + jj) as usize, (r + jj) as usize)];
                        assert!(o.im.abs() < 1e-12);
                        let got = small_d(j, m, r, beta).unwrap();
                        assert!(
                            (got - o.re).abs() < 1e-12,
                            "j={j} m={m} r={r} beta={beta}: {got} vs {}",
                            o.re
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn large_j_stays_orthogonal() {
        // rows of d^j(beta) remain orthonormal at j = 20
        let j = 20u32;
        let jj = j as i32;
        let beta = 1.234_f64;
        for m in [-20, -7, 0, 13, 20] {
            for m2 in [-20, 0, 13] {
                let dot: f64 = (-jj..=jj)
                    .map(|r| small_d(j, m, r, beta).unwrap() * small_d(j, m2, r, beta).unwrap())
                    .sum();
                let want = if m == m2 { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-11, "m={m} m2={m2}: {dot}");
            }
        }
    }

    #[test]
    fn big_d_phases() {
        let id = EulerAngles::new(0.0, 0.0, 0.0);
        assert!((big_d(2, 1, 1, &id).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(big_d(2, 1, -1, &id).unwrap().norm() < 1e-15);
        let v = big_d(1, 1, 1, &EulerAngles::new(PI, 0.0, 0.0)).unwrap();
        assert!((v - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let v = big_d(1, 0, 0, &EulerAngles::new(0.7, 1.3, 4.1)).unwrap();
        assert!((v - C64::new(f64::cos(1.3), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn table_matches_pointwise() {
        let t = SmallDTable::new(5, 0.77_f64);
        for j in 0..=5u32 {
            let jj = j as i32;
            for m in -jj..=jj {
                for r in -jj..=jj {
                    assert_eq!(t.get(j, m, r), small_d(j, m, r, 0.77).unwrap());
                }
            }
        }
    }
}
