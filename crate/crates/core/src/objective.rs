//! The Hermitian matrix `M_{jm,kn} = sum_{r,s} f[j,k,m,n,r,s] b_{jr} b*_{ks}`
//! and the figures of merit derived from `<A|M|A>`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::coefficients::{assemble_tensor, Objective, SparseCoefficientTensor};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::so3::flat_index;
use crate::states::{AliceState, FiducialState};

/// Dense `d x d` matrix, row-major over flattened `(j, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveMatrix<T> {
    n: u32,
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ObjectiveMatrix<T> {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `||M v - lambda v||`.
    pub fn residual(&self, lambda: T, v: &[Complex<T>]) -> T {
        (0..self.dim)
            .map(|i| {
                let mv: Complex<T> = (0..self.dim).map(|j| self.get(i, j) * v[j]).sum();
                (mv - v[i] * lambda).norm_sqr()
            })
            .sum::<T>()
            .sqrt()
    }
}

pub fn build_m<T: Real>(tensor: &SparseCoefficientTensor<T>, b: &FiducialState<T>) -> Result<ObjectiveMatrix<T>> {
    if tensor.level() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: tensor.level() as usize,
            found: b.n() as usize,
        });
    }
    let dim = b.dimension();
    let mut data = vec![Complex::default(); dim * dim];
    for (key, f) in tensor.entries() {
        let row = flat_index(key.j, key.m);
        let col = flat_index(key.k, key.n);
        data[row * dim + col] += *f * b.get(key.j, key.r) * b.get(key.k, key.s).conj();
    }
    Ok(ObjectiveMatrix { n: b.n(), dim, data })
}

/// `<A|M|A>`.
pub fn expected_value<T: Real>(m: &ObjectiveMatrix<T>, a: &AliceState<T>) -> Result<T> {
    if m.n != a.n() {
        return Err(Error::DimensionMismatch {
            expected: m.dim,
            found: a.dimension(),
        });
    }
    let c = a.coefficients();
    let mut acc = Complex::<T>::default();
    for (i, ci) in c.iter().enumerate() {
        let row: Complex<T> = (0..m.dim).map(|j| m.get(i, j) * c[j]).sum();
        acc += ci.conj() * row;
    }
    Ok(acc.re)
}

/// `sum f a*_{jm} b_{jr} a_{kn} b*_{ks}` straight from the tensor.
pub fn expectation<T: Real>(tensor: &SparseCoefficientTensor<T>, a: &AliceState<T>, b: &FiducialState<T>) -> Result<T> {
    if tensor.level() != a.n() || a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: tensor.level() as usize,
            found: a.n().max(b.n()) as usize,
        });
    }
    Ok(contract(tensor, a.coefficients(), b.coefficients()))
}

/// Contraction on raw flattened coefficient slices.
pub(crate) fn contract<T: Real>(tensor: &SparseCoefficientTensor<T>, a: &[Complex<T>], b: &[Complex<T>]) -> T {
    let mut acc = Complex::<T>::default();
    for (key, f) in tensor.entries() {
        let left = a[flat_index(key.j, key.m)].conj() * b[flat_index(key.j, key.r)];
        let right = a[flat_index(key.k, key.n)] * b[flat_index(key.k, key.s)].conj();
        acc += *f * left * right;
    }
    acc.re
}

/// Axis-resolved transmission quality of a pair `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport<T> {
    pub expect_cos_z: T,
    /// `<cos omega_x + cos omega_y>`.
    pub expect_cos_xy: T,
    pub expect_cos_sum: T,
    /// `(K - lambda) / 2K`: mean of `(1 - <cos omega>)/2` over the active axes.
    pub mse_per_axis: T,
    /// `(K - lambda) / 2`: the same errors summed over the active axes.
    pub mse_total: T,
    /// Objective value `w_z <cos z> + w_xy <cos x + cos y>`.
    pub lambda: T,
}

impl<T: Real> FidelityReport<T> {
    pub fn from_expectations(cos_z: T, cos_xy: T, objective: &Objective<T>) -> Self {
        let (w_z, w_xy) = objective.axis_weights();
        let lambda = w_z * cos_z + w_xy * cos_xy;
        let k = objective.axis_count();
        let two = T::lit(2.0);
        Self {
            expect_cos_z: cos_z,
            expect_cos_xy: cos_xy,
            expect_cos_sum: cos_z + cos_xy,
            mse_per_axis: (k - lambda) / (two * k),
            mse_total: (k - lambda) / two,
            lambda,
        }
    }
}

/// Evaluates the z and xy expectations once and combines them per objective.
pub fn fidelity_report<T: Real>(
    a: &AliceState<T>,
    b: &FiducialState<T>,
    objective: &Objective<T>,
) -> Result<FidelityReport<T>> {
    objective.validate()?;
    let j_max = a.n() - 1;
    let cos_z = expectation(&assemble_tensor(Objective::ZAxis, j_max)?, a, b)?;
    let cos_xy = expectation(&assemble_tensor(Objective::XyAxes, j_max)?, a, b)?;
    Ok(FidelityReport::from_expectations(cos_z, cos_xy, objective))
}
