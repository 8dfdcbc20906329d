//! Alternating optimization of Alice's signal and Bob's fiducial state.

mod direct_search;
mod fixed_point;
mod sweep;

pub use direct_search::{
    direct_search_optimize, direct_search_optimize_real, powell_minimize, PowellOptions, PowellOutcome,
    DIRECT_SEARCH_MAX_N,
};
pub use fixed_point::{fixed_point_optimize, optimize_z_single_m, z_sector_matrix, Initialization};
pub use sweep::{
    best_of_starts, fit_asymptote, fit_asymptote_by, fit_power_law, sweep, PowerLawFit, SweepOptions, SweepRow,
};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::eigen::hermitian_top_eigenpair;
use crate::error::Result;
use crate::objective::ObjectiveMatrix;
use crate::scalar::Real;
use crate::states::{normalize_block, AliceState, FiducialState, StateDocument};

/// Default stopping tolerance on successive objective values.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Best pair `(a, b)` found by an optimizer and how it got there.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub a: AliceState<T>,
    pub b: FiducialState<T>,
    pub lambda: T,
    pub lambda_trajectory: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Blocks of `b` set uniform because `a` had no weight there.
    pub degenerate_blocks: Vec<u32>,
}

impl<T: Real> OptimizationResult<T> {
    pub fn n(&self) -> u32 {
        self.a.n()
    }

    pub fn to_document(&self) -> ResultDocument<T> {
        ResultDocument {
            n: self.a.n(),
            lambda: self.lambda,
            lambda_trajectory: self.lambda_trajectory.clone(),
            iterations: self.iterations,
            converged: self.converged,
            degenerate_blocks: self.degenerate_blocks.clone(),
            a: self.a.to_document(),
            b: self.b.to_document(),
        }
    }

    pub fn from_document(doc: &ResultDocument<T>) -> Result<Self> {
        Ok(Self {
            a: AliceState::from_document(&doc.a)?,
            b: FiducialState::from_document(&doc.b)?,
            lambda: doc.lambda,
            lambda_trajectory: doc.lambda_trajectory.clone(),
            iterations: doc.iterations,
            converged: doc.converged,
            degenerate_blocks: doc.degenerate_blocks.clone(),
        })
    }
}

/// JSON form of [`OptimizationResult`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ResultDocument<T> {
    pub n: u32,
    pub lambda: T,
    pub lambda_trajectory: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default)]
    pub degenerate_blocks: Vec<u32>,
    pub a: StateDocument<T>,
    pub b: StateDocument<T>,
}

/// Largest eigenvalue of `M` with its eigenvector as a phase-fixed signal state.
pub fn top_eigenpair<T: Real>(m: &ObjectiveMatrix<T>) -> Result<(T, AliceState<T>)> {
    let (lambda, v) = hermitian_top_eigenpair(m.data(), m.dim());
    Ok((lambda, AliceState::normalized(m.n(), v)?.canonical()))
}

/// `b_{jm} = a_{jm} / sqrt(sum_n |a_{jn}|^2)` block by block.
///
/// Blocks where `a` carries no weight are set to the uniform vector and
/// their `j` is returned in the second component.
pub fn b_from_a<T: Real>(a: &AliceState<T>) -> Result<(FiducialState<T>, Vec<u32>)> {
    let mut coeffs: Vec<Complex<T>> = a.coefficients().to_vec();
    let mut flagged = Vec::new();
    for j in 0..a.n() {
        let range = (j * j) as usize..((j + 1) * (j + 1)) as usize;
        if !normalize_block(j, &mut coeffs[range]) {
            flagged.push(j);
        }
    }
    Ok((FiducialState::new(a.n(), coeffs)?, flagged))
}

/// Distance between two coefficient vectors.
pub(crate) fn distance<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> T {
    x.iter().zip(y).map(|(p, q)| (*p - *q).norm_sqr()).sum::<T>().sqrt()
}

/// Largest component deviation of `b` from `b_from_a(a)` after removing the
/// one relative phase between them that the objective cannot see.
pub fn renormalization_defect<T: Real>(a: &AliceState<T>, b: &FiducialState<T>) -> Result<T> {
    let (ideal, _) = b_from_a(a)?;
    let overlap: Complex<T> = ideal
        .coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(p, q)| p.conj() * *q)
        .sum();
    let phase = if overlap.norm() > T::zero() {
        overlap.conj() / overlap.norm()
    } else {
        Complex::new(T::one(), T::zero())
    };
    Ok(ideal
        .coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(p, q)| (*q * phase - *p).norm())
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::AngularIndex;

    type C = Complex<f64>;

    #[test]
    fn b_from_concentrated_a() {
        let a = AliceState::<f64>::basis(3, AngularIndex::new(1, -1).unwrap()).unwrap();
        let (b, flagged) = b_from_a(&a).unwrap();
        assert_eq!(flagged, vec![0, 2]);
        assert_eq!(b.get(1, -1), C::new(1.0, 0.0));
        assert_eq!(b.get(1, 0), C::new(0.0, 0.0));
        assert!((b.get(2, 1).re - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((b.get(0, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn b_from_generic_a() {
        let a = AliceState::normalized(
            2,
            vec![C::new(0.7, 0.0), C::new(0.3, 0.1), C::new(0.0, -0.5), C::new(0.0, 0.0)],
        )
        .unwrap();
        let (b, flagged) = b_from_a(&a).unwrap();
        assert!(flagged.is_empty());
        assert!(b.normalization_defect() < 1e-14);
        let w0 = a.block_weight(0).sqrt();
        assert!((b.get(0, 0) - a.get(0, 0) / w0).norm() < 1e-15);
    }

    #[test]
    fn b_from_balanced_a_scales_by_block_count() {
        let mut c = Vec::new();
        for j in 0..3u32 {
            let dim = 2 * j + 1;
            for _ in 0..dim {
                c.push(C::new(1.0 / (3.0 * dim as f64).sqrt(), 0.0));
            }
        }
        let a = AliceState::new(3, c).unwrap();
        let (b, _) = b_from_a(&a).unwrap();
        for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
            assert!((*y - *x * 3f64.sqrt()).norm() < 1e-14);
        }
    }
}
