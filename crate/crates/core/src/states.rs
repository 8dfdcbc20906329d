//! Alice's signal state and Bob's fiducial state on the level
//! `j = 0..n-1`, stored in flattened `(j, m)` order.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::so3::{check_index, flat_index, level_dimension, level_indices, AngularIndex};

/// JSON form shared by both states: `{n, coefficients: [[j, m, re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StateDocument<T> {
    pub n: u32,
    pub coefficients: Vec<(u32, i32, T, T)>,
}

impl<T: Real> StateDocument<T> {
    fn from_coefficients(n: u32, coeffs: &[Complex<T>]) -> Self {
        Self {
            n,
            coefficients: level_indices(n)
                .zip(coeffs)
                .map(|(idx, c)| (idx.j, idx.m, c.re, c.im))
                .collect(),
        }
    }

    /// Dense coefficients; labels not listed are zero.
    pub fn dense(&self) -> Result<Vec<Complex<T>>> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let mut out = vec![Complex::default(); level_dimension(self.n)];
        for &(j, m, re, im) in &self.coefficients {
            check_index(j, m)?;
            if j >= self.n {
                return Err(Error::IndexOutOfRange {
                    j: j as i64,
                    m: m as i64,
                });
            }
            out[flat_index(j, m)] = Complex::new(re, im);
        }
        Ok(out)
    }
}

fn check_len(n: u32, len: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let d = level_dimension(n);
    if len != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: len,
        });
    }
    Ok(())
}

fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn block_range(j: u32) -> std::ops::Range<usize> {
    let j = j as usize;
    j * j..(j + 1) * (j + 1)
}

/// Multiplies by the phase that makes the first component of (near-)maximal
/// modulus real and positive.
pub(crate) fn fix_global_phase<T: Real>(v: &mut [Complex<T>]) {
    let max = v.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    if max == T::zero() {
        return;
    }
    let cut = max * (T::one() - T::lit(1e-9));
    if let Some(lead) = v.iter().find(|c| c.norm() >= cut).copied() {
        let phase = lead.conj() / lead.norm();
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

fn gaussian_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex<T>> {
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect()
}

/// `|A> = sum a_{jm} |j,m>` with unit total norm.
#[derive(Debug, Clone, PartialEq)]
pub struct AliceState<T> {
    n: u32,
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> AliceState<T> {
    /// Validates length `n^2` and unit norm.
    pub fn new(n: u32, coefficients: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, coefficients.len())?;
        let norm = norm_sqr(&coefficients);
        if (norm - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::NotNormalized(format!("total norm^2 = {norm}")));
        }
        Ok(Self { n, coefficients })
    }

    /// Rescales to unit norm.
    pub fn normalized(n: u32, mut coefficients: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, coefficients.len())?;
        let norm = norm_sqr(&coefficients).sqrt();
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::NotNormalized("zero vector".into()));
        }
        for c in &mut coefficients {
            *c /= norm;
        }
        Ok(Self { n, coefficients })
    }

    /// Unit vector on a single basis label.
    pub fn basis(n: u32, idx: AngularIndex) -> Result<Self> {
        check_len(n, level_dimension(n))?;
        if idx.j >= n {
            return Err(Error::IndexOutOfRange {
                j: idx.j as i64,
                m: idx.m as i64,
            });
        }
        let mut c = vec![Complex::default(); level_dimension(n)];
        c[idx.flat()] = Complex::new(T::one(), T::zero());
        Ok(Self { n, coefficients: c })
    }

    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        Self::normalized(n, gaussian_vector(rng, level_dimension(n)))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Hilbert-space dimension `d = n^2`.
    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn get(&self, j: u32, m: i32) -> Complex<T> {
        self.coefficients[flat_index(j, m)]
    }

    pub fn block(&self, j: u32) -> &[Complex<T>] {
        &self.coefficients[block_range(j)]
    }

    pub fn block_weight(&self, j: u32) -> T {
        norm_sqr(self.block(j))
    }

    /// Global phase fixed: the leading largest-modulus component is real positive.
    pub fn canonical(mut self) -> Self {
        fix_global_phase(&mut self.coefficients);
        self
    }

    pub fn to_document(&self) -> StateDocument<T> {
        StateDocument::from_coefficients(self.n, &self.coefficients)
    }

    pub fn from_document(doc: &StateDocument<T>) -> Result<Self> {
        Self::new(doc.n, doc.dense()?)
    }
}

/// `|B> = sum sqrt(2j+1) b_{jm} |j,m>`; each `j` block of `b` has unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct FiducialState<T> {
    n: u32,
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> FiducialState<T> {
    /// Validates length and per-block unit norm.
    pub fn new(n: u32, coefficients: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, coefficients.len())?;
        for j in 0..n {
            let norm = norm_sqr(&coefficients[block_range(j)]);
            if (norm - T::one()).abs() > T::norm_tolerance() {
                return Err(Error::NotNormalized(format!("block j = {j} has norm^2 = {norm}")));
            }
        }
        Ok(Self { n, coefficients })
    }

    /// Skips validation; used to probe the completeness defect of
    /// improperly normalized fiducials.
    pub fn new_unchecked(n: u32, coefficients: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, coefficients.len())?;
        Ok(Self { n, coefficients })
    }

    /// Normalizes each block separately; a zero block becomes uniform.
    pub fn normalized(n: u32, mut coefficients: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, coefficients.len())?;
        for j in 0..n {
            normalize_block(j, &mut coefficients[block_range(j)]);
        }
        Ok(Self { n, coefficients })
    }

    /// `b_{jm} = 1/sqrt(2j+1)`.
    pub fn uniform(n: u32) -> Result<Self> {
        check_len(n, level_dimension(n))?;
        let coefficients = level_indices(n)
            .map(|idx| Complex::new(T::one() / T::from_int(2 * idx.j as i64 + 1).sqrt(), T::zero()))
            .collect();
        Ok(Self { n, coefficients })
    }

    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        check_len(n, level_dimension(n))?;
        Self::normalized(n, gaussian_vector(rng, level_dimension(n)))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn get(&self, j: u32, m: i32) -> Complex<T> {
        self.coefficients[flat_index(j, m)]
    }

    pub fn block(&self, j: u32) -> &[Complex<T>] {
        &self.coefficients[block_range(j)]
    }

    /// Largest `|sum_m |b_{jm}|^2 - 1|` over blocks.
    pub fn normalization_defect(&self) -> T {
        (0..self.n)
            .map(|j| (norm_sqr(self.block(j)) - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    pub fn to_document(&self) -> StateDocument<T> {
        StateDocument::from_coefficients(self.n, &self.coefficients)
    }

    pub fn from_document(doc: &StateDocument<T>) -> Result<Self> {
        Self::new(doc.n, doc.dense()?)
    }
}

/// Returns `false` when the block had no weight and was set uniform.
pub(crate) fn normalize_block<T: Real>(j: u32, block: &mut [Complex<T>]) -> bool {
    let norm = norm_sqr(block).sqrt();
    if norm < T::lit(1e-14) || !norm.is_finite() {
        let u = T::one() / T::from_int(2 * j as i64 + 1).sqrt();
        for c in block.iter_mut() {
            *c = Complex::new(u, T::zero());
        }
        false
    } else {
        for c in block.iter_mut() {
            *c /= norm;
        }
        true
    }
}
