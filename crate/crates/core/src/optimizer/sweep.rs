use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fixed_point::{fixed_point_optimize, Initialization};
use super::OptimizationResult;
use crate::coefficients::{assemble_tensor, Objective};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Random starts tried in addition to the uniform one.
    pub random_restarts: usize,
    pub seed: u64,
}

impl<T: Real> Default for SweepOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(super::DEFAULT_TOLERANCE),
            max_iter: super::DEFAULT_MAX_ITER,
            random_restarts: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SweepRow<T> {
    pub n: u32,
    pub d: u32,
    pub lambda: T,
    pub mse_per_axis: T,
    pub mse_total: T,
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Real> SweepRow<T> {
    pub fn from_result(objective: &Objective<T>, result: &OptimizationResult<T>) -> Self {
        let k = objective.axis_count();
        let lambda = result.lambda;
        Self {
            n: result.n(),
            d: result.n() * result.n(),
            lambda,
            mse_per_axis: (k - lambda) / (T::lit(2.0) * k),
            mse_total: (k - lambda) / T::lit(2.0),
            converged: result.converged,
            iterations: result.iterations,
        }
    }

    pub const CSV_HEADER: &'static str = "n,d,lambda,mse_per_axis,converged";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.11e},{:.11e},{}",
            self.n,
            self.d,
            self.lambda.to_f64_lossy(),
            self.mse_per_axis.to_f64_lossy(),
            self.converged
        )
    }
}

/// Best fixed-point optimum at one level over the uniform start and
/// `random_restarts` random ones.
pub fn best_of_starts<T: Real>(
    objective: &Objective<T>,
    n: u32,
    opts: &SweepOptions<T>,
) -> Result<OptimizationResult<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let tensor = assemble_tensor(*objective, n - 1)?;
    let mut best = fixed_point_optimize(&tensor, n, Initialization::Uniform, opts.tol, opts.max_iter)?;
    for restart in 0..opts.random_restarts {
        let init = Initialization::Random {
            seed: opts.seed,
            stream: ((n as u64) << 16) | restart as u64,
        };
        let r = fixed_point_optimize(&tensor, n, init, opts.tol, opts.max_iter)?;
        if r.lambda > best.lambda {
            best = r;
        }
    }
    Ok(best)
}

/// Optimizes every level in `n_from..=n_to` in parallel; rows come back
/// sorted by `n`.
pub fn sweep<T: Real>(
    objective: &Objective<T>,
    n_from: u32,
    n_to: u32,
    opts: &SweepOptions<T>,
) -> Result<Vec<SweepRow<T>>> {
    objective.validate()?;
    if n_from == 0 || n_from > n_to {
        return Err(Error::InvalidArgument(format!("invalid level range {n_from}..={n_to}")));
    }
    let mut rows = (n_from..=n_to)
        .into_par_iter()
        .map(|n| best_of_starts(objective, n, opts).map(|r| SweepRow::from_result(objective, &r)))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

/// `y ~ prefactor * x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PowerLawFit<T> {
    pub prefactor: T,
    pub exponent: T,
    pub points: usize,
}

impl<T: Real> PowerLawFit<T> {
    pub fn eval(&self, x: T) -> T {
        self.prefactor * x.powf(self.exponent)
    }
}

/// Least squares line through `(ln x, ln y)`.
pub fn fit_power_law<T: Real>(points: &[(T, T)]) -> Result<PowerLawFit<T>> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            found: points.len(),
        });
    }
    if let Some(p) = points.iter().find(|(x, y)| !(*x > T::zero() && *y > T::zero())) {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs positive data, got ({}, {})",
            p.0, p.1
        )));
    }
    let count = T::from_int(points.len() as i64);
    let lx: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / count;
    let my = ly.iter().copied().sum::<T>() / count;
    let sxx: T = lx.iter().map(|x| (*x - mx) * (*x - mx)).sum();
    let sxy: T = lx.iter().zip(&ly).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    if !(sxx > T::zero()) {
        return Err(Error::InvalidArgument(
            "power-law fit needs at least two distinct x values".into(),
        ));
    }
    let exponent = sxy / sxx;
    Ok(PowerLawFit {
        prefactor: (my - exponent * mx).exp(),
        exponent,
        points: points.len(),
    })
}

/// Fits `mse_per_axis` against `d` over rows with `n >= n_min`.
pub fn fit_asymptote<T: Real>(rows: &[SweepRow<T>], n_min: u32) -> Result<PowerLawFit<T>> {
    fit_asymptote_by(rows, n_min, |r| r.mse_per_axis)
}

pub fn fit_asymptote_by<T: Real>(
    rows: &[SweepRow<T>],
    n_min: u32,
    value: impl Fn(&SweepRow<T>) -> T,
) -> Result<PowerLawFit<T>> {
    let points: Vec<(T, T)> = rows
        .iter()
        .filter(|r| r.n >= n_min)
        .map(|r| (T::from_int(r.d as i64), value(r)))
        .collect();
    fit_power_law(&points)
}
