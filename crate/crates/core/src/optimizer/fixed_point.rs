use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{b_from_a, distance, top_eigenpair, OptimizationResult};
use crate::coefficients::{g_element, SparseCoefficientTensor};
use crate::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::objective::{build_m, expected_value};
use crate::scalar::Real;
use crate::so3::flat_index;
use crate::states::{AliceState, FiducialState};
use num_complex::Complex;

/// Starting fiducial state for the alternating iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Initialization<T> {
    /// `b_{jm} = 1/sqrt(2j+1)`.
    Uniform,
    Given(FiducialState<T>),
    /// Complex Gaussian coefficients from ChaCha8 stream `stream` of `seed`.
    Random {
        seed: u64,
        stream: u64,
    },
}

impl<T: Real> Initialization<T> {
    fn fiducial(&self, n: u32) -> Result<FiducialState<T>> {
        match self {
            Initialization::Uniform => FiducialState::uniform(n),
            Initialization::Given(b) => {
                if b.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n as usize,
                        found: b.n() as usize,
                    });
                }
                Ok(b.clone())
            }
            Initialization::Random { seed, stream } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(*stream);
                FiducialState::random(n, &mut rng)
            }
        }
    }
}

/// Alternates `b -> M(b) -> top eigenvector a -> b_from_a(a)`.
///
/// Converged when the new `b` equals the old one to within `sqrt(tol)` and,
/// after the first pass, successive eigenvalues differ by less than `tol`
/// and successive signal states by less than `sqrt(tol)`. Hitting `max_iter`
/// is reported through `converged = false`. A drop in the objective larger
/// than `1e-9` is an error: it only happens when the tensor or the matrix
/// assembly is inconsistent.
pub fn fixed_point_optimize<T: Real>(
    tensor: &SparseCoefficientTensor<T>,
    n: u32,
    init: Initialization<T>,
    tol: T,
    max_iter: usize,
) -> Result<OptimizationResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if tensor.level() != n {
        return Err(Error::DimensionMismatch {
            expected: n as usize,
            found: tensor.level() as usize,
        });
    }
    let drop_limit = T::lit(1e-9).max(T::epsilon() * T::lit(1e3));
    let state_tol = tol.sqrt();

    let mut b = init.fiducial(n)?;
    let mut trajectory: Vec<T> = Vec::new();
    let mut previous: Option<AliceState<T>> = None;
    let mut converged = false;
    let mut last = None;

    for iteration in 1..=max_iter {
        let m = build_m(tensor, &b)?;
        let (lambda, a) = top_eigenpair(&m)?;
        if let Some(&prev) = trajectory.last() {
            if lambda < prev - drop_limit {
                return Err(Error::NonMonotone {
                    iteration,
                    previous: prev.to_f64_lossy(),
                    current: lambda.to_f64_lossy(),
                });
            }
        }
        let (next_b, flagged) = b_from_a(&a)?;
        let b_still = distance(next_b.coefficients(), b.coefficients()) < state_tol;
        let settled = match (&previous, trajectory.last()) {
            (Some(pa), Some(&pl)) => {
                (lambda - pl).abs() < tol && distance(a.coefficients(), pa.coefficients()) < state_tol
            }
            _ => true,
        };
        trajectory.push(lambda);
        b = next_b;
        last = Some((a.clone(), flagged, iteration));
        previous = Some(a);
        if b_still && settled {
            converged = true;
            break;
        }
    }

    let (a, degenerate_blocks, iterations) = last.expect("at least one iteration");
    let lambda = expected_value(&build_m(tensor, &b)?, &a)?;
    Ok(OptimizationResult {
        a,
        b,
        lambda,
        lambda_trajectory: trajectory,
        iterations,
        converged,
        degenerate_blocks,
    })
}

/// Tridiagonal `<cos beta>` matrix of the sector with magnetic number `m`,
/// over `j = |m|..n-1` with the fiducial concentrated on `r = m`.
pub fn z_sector_matrix<T: Real>(n: u32, m: i32) -> Result<Vec<T>> {
    if n == 0 || m.unsigned_abs() >= n {
        return Err(Error::IndexOutOfRange {
            j: n as i64 - 1,
            m: m as i64,
        });
    }
    let lo = m.unsigned_abs();
    let size = (n - lo) as usize;
    let mut mat = vec![T::zero(); size * size];
    for (row, j) in (lo..n).enumerate() {
        mat[row * size + row] = g_element(j, j, m, m)?;
        if row + 1 < size {
            let v = g_element(j, j + 1, m, m)?;
            mat[row * size + row + 1] = v;
            mat[(row + 1) * size + row] = v;
        }
    }
    Ok(mat)
}

/// Optimum of the z-axis problem restricted to one magnetic number `m`.
pub fn optimize_z_single_m<T: Real>(n: u32, m: i32) -> Result<OptimizationResult<T>> {
    let mat = z_sector_matrix::<T>(n, m)?;
    let size = (n - m.unsigned_abs()) as usize;
    let eig = symmetric_eigen(&mat, size);
    let lambda = eig.values[size - 1];
    let mut coeffs = vec![Complex::default(); (n * n) as usize];
    for (row, j) in (m.unsigned_abs()..n).enumerate() {
        coeffs[flat_index(j, m)] = Complex::new(eig.vectors[row][size - 1], T::zero());
    }
    let a = AliceState::normalized(n, coeffs)?.canonical();
    let (b, degenerate_blocks) = b_from_a(&a)?;
    Ok(OptimizationResult {
        a,
        b,
        lambda,
        lambda_trajectory: vec![lambda],
        iterations: 1,
        converged: true,
        degenerate_blocks,
    })
}
