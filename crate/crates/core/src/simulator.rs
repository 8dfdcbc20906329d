//! Covariant measurement: POVM completeness and Monte Carlo sampling of
//! Bob's outcomes.

use std::io::Write;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::SO3Grid;
use crate::scalar::Real;
use crate::so3::{axis_cosines, error_angles, EulerAngles, SmallDTable};
use crate::states::{AliceState, FiducialState};

/// Samples drawn per independent RNG stream.
pub const CHUNK_SIZE: usize = 4096;

fn phases<T: Real>(j_max: u32, angle: T) -> Vec<Complex<T>> {
    let j = j_max as i64;
    (-j..=j)
        .map(|m| {
            let x = T::from_int(m) * angle;
            Complex::new(x.cos(), x.sin())
        })
        .collect()
}

/// `U(angles)|B>` including the `sqrt(2j+1)` weights of the POVM elements.
pub fn rotated_fiducial<T: Real>(b: &FiducialState<T>, angles: &EulerAngles<T>) -> Vec<Complex<T>> {
    let n = b.n();
    let j_max = n - 1;
    let table = SmallDTable::new(j_max, angles.beta);
    let pa = phases(j_max, angles.alpha);
    let pg = phases(j_max, angles.gamma);
    let off = j_max as i32;
    let mut out = Vec::with_capacity(b.dimension());
    for j in 0..n {
        let weight = T::from_int(2 * j as i64 + 1).sqrt();
        let ji = j as i32;
        let block = b.block(j);
        for m in -ji..=ji {
            let mut acc = Complex::new(T::zero(), T::zero());
            for r in -ji..=ji {
                acc += pg[(r + off) as usize] * block[(r + ji) as usize] * table.get(j, m, r);
            }
            out.push(pa[(m + off) as usize] * acc * weight);
        }
    }
    out
}

/// `<A|U(err)|B>`.
pub fn amplitude<T: Real>(a: &AliceState<T>, b: &FiducialState<T>, err: &EulerAngles<T>) -> Result<Complex<T>> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.dimension(),
            found: b.dimension(),
        });
    }
    Ok(a.coefficients()
        .iter()
        .zip(rotated_fiducial(b, err))
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Density of the error rotation relative to the Haar measure.
pub fn error_density<T: Real>(a: &AliceState<T>, b: &FiducialState<T>, err: &EulerAngles<T>) -> Result<T> {
    Ok(amplitude(a, b, err)?.norm_sqr())
}

/// `|<A|U(true)^dagger U(meas)|B>|^2`, the density of outcome `meas` when the
/// signal was prepared in the frame `true_rot`.
pub fn outcome_density<T: Real>(
    a: &AliceState<T>,
    b: &FiducialState<T>,
    true_rot: &EulerAngles<T>,
    meas: &EulerAngles<T>,
) -> Result<T> {
    error_density(a, b, &error_angles(true_rot, meas))
}

/// Largest entry of `|int U|B><B|U^dagger - 1|` over the grid.
pub fn povm_defect<T: Real>(b: &FiducialState<T>, grid: &SO3Grid<T>) -> T {
    let dim = b.dimension();
    let mut acc = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    for (angles, w) in grid.nodes() {
        let v = rotated_fiducial(b, &angles);
        for (row, vr) in v.iter().enumerate() {
            let scaled = *vr * w;
            for (col, vc) in v.iter().enumerate() {
                acc[row * dim + col] += scaled * vc.conj();
            }
        }
    }
    let mut worst = T::zero();
    for row in 0..dim {
        for col in 0..dim {
            let target = if row == col { T::one() } else { T::zero() };
            worst = worst.max((acc[row * dim + col] - Complex::new(target, T::zero())).norm());
        }
    }
    worst
}

/// Draws one measurement outcome by rejection against the Haar measure with
/// envelope `n^2`. Returns the outcome and the number of proposals used.
pub fn sample_outcome<T: Real, R: Rng + ?Sized>(
    a: &AliceState<T>,
    b: &FiducialState<T>,
    true_rot: &EulerAngles<T>,
    rng: &mut R,
) -> Result<(EulerAngles<T>, usize)> {
    let envelope = T::from_int((a.n() * a.n()) as i64);
    let true_matrix = crate::so3::rotation_matrix(true_rot).transpose();
    let mut proposals = 0;
    loop {
        proposals += 1;
        let meas = EulerAngles::haar_random(rng);
        let err = (true_matrix * crate::so3::rotation_matrix(&meas)).to_euler();
        let p = error_density(a, b, &err)?;
        if T::lit(rng.random::<f64>()) * envelope < p {
            return Ok((meas, proposals));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real")]
pub enum TrueRotation<T> {
    /// Fresh Haar-random frame for every sample.
    Haar,
    Fixed {
        angles: EulerAngles<T>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloOptions<T> {
    pub samples: usize,
    pub seed: u64,
    pub true_rotation: TrueRotation<T>,
    pub keep_samples: bool,
}

impl<T: Real> MonteCarloOptions<T> {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            true_rotation: TrueRotation::Haar,
            keep_samples: false,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Estimate<T> {
    pub mean: T,
    pub std_error: T,
}

impl<T: Real> Estimate<T> {
    /// Distance from `value` in units of the standard error.
    pub fn z_score(&self, value: T) -> T {
        if self.std_error > T::zero() {
            (self.mean - value).abs() / self.std_error
        } else if self.mean == value {
            T::zero()
        } else {
            T::infinity()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MonteCarloReport<T> {
    pub samples: usize,
    pub proposals: usize,
    pub acceptance_rate: T,
    pub seed: u64,
    pub true_rotation: TrueRotation<T>,
    pub mean_cos_x: Estimate<T>,
    pub mean_cos_y: Estimate<T>,
    pub mean_cos_x_plus_y: Estimate<T>,
    pub mean_cos_z: Estimate<T>,
    pub mean_cos_sum: Estimate<T>,
}

/// One accepted outcome: the error rotation and its axis cosines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SampleRecord<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub cos_x: T,
    pub cos_y: T,
    pub cos_z: T,
}

pub const SAMPLE_CSV_HEADER: &str = "alpha,beta,gamma,cos_x,cos_y,cos_z";

pub fn write_samples_csv<T: Real, W: Write>(mut out: W, records: &[SampleRecord<T>]) -> std::io::Result<()> {
    writeln!(out, "{SAMPLE_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            r.alpha.to_f64_lossy(),
            r.beta.to_f64_lossy(),
            r.gamma.to_f64_lossy(),
            r.cos_x.to_f64_lossy(),
            r.cos_y.to_f64_lossy(),
            r.cos_z.to_f64_lossy()
        )?;
    }
    Ok(())
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy)]
struct Moments<T> {
    count: usize,
    mean: T,
    m2: T,
}

impl<T: Real> Moments<T> {
    fn new() -> Self {
        Self {
            count: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }

    fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / T::from_int(self.count as i64);
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let (na, nb, nt) = (
            T::from_int(self.count as i64),
            T::from_int(other.count as i64),
            T::from_int(count as i64),
        );
        let delta = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + delta * nb / nt,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nt,
        }
    }

    fn estimate(&self) -> Estimate<T> {
        let std_error = if self.count > 1 {
            let n = T::from_int(self.count as i64);
            (self.m2 / (n - T::one())).sqrt() / n.sqrt()
        } else {
            T::zero()
        };
        Estimate {
            mean: self.mean,
            std_error,
        }
    }
}

struct ChunkResult<T> {
    moments: [Moments<T>; 5],
    proposals: usize,
    records: Vec<SampleRecord<T>>,
}

fn run_chunk<T: Real>(
    a: &AliceState<T>,
    b: &FiducialState<T>,
    opts: &MonteCarloOptions<T>,
    stream: u64,
    count: usize,
) -> Result<ChunkResult<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(stream);
    let mut moments = [Moments::new(); 5];
    let mut proposals = 0;
    let mut records = Vec::new();
    for _ in 0..count {
        let true_rot = match opts.true_rotation {
            TrueRotation::Haar => EulerAngles::haar_random(&mut rng),
            TrueRotation::Fixed { angles } => angles,
        };
        let (meas, used) = sample_outcome(a, b, &true_rot, &mut rng)?;
        proposals += used;
        let err = error_angles(&true_rot, &meas);
        let (cx, cy, cz) = axis_cosines(&err);
        for (acc, v) in moments.iter_mut().zip([cx, cy, cx + cy, cz, cx + cy + cz]) {
            acc.push(v);
        }
        if opts.keep_samples {
            records.push(SampleRecord {
                alpha: err.alpha,
                beta: err.beta,
                gamma: err.gamma,
                cos_x: cx,
                cos_y: cy,
                cos_z: cz,
            });
        }
    }
    Ok(ChunkResult {
        moments,
        proposals,
        records,
    })
}

/// Estimates the mean axis cosines between true and estimated frames.
///
/// Work is split into chunks of [`CHUNK_SIZE`] samples, chunk `i` drawing
/// from stream `i` of the seed, so results do not depend on thread count.
pub fn monte_carlo<T: Real>(
    a: &AliceState<T>,
    b: &FiducialState<T>,
    opts: &MonteCarloOptions<T>,
) -> Result<(MonteCarloReport<T>, Vec<SampleRecord<T>>)> {
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.dimension(),
            found: b.dimension(),
        });
    }
    let chunks = opts.samples.div_ceil(CHUNK_SIZE);
    let results = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let count = CHUNK_SIZE.min(opts.samples - i * CHUNK_SIZE);
            run_chunk(a, b, opts, i as u64, count)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut moments = [Moments::new(); 5];
    let mut proposals = 0;
    let mut records = Vec::new();
    for chunk in results {
        for (acc, m) in moments.iter_mut().zip(chunk.moments) {
            *acc = acc.merge(m);
        }
        proposals += chunk.proposals;
        records.extend(chunk.records);
    }
    let report = MonteCarloReport {
        samples: opts.samples,
        proposals,
        acceptance_rate: T::from_int(opts.samples as i64) / T::from_int(proposals as i64),
        seed: opts.seed,
        true_rotation: opts.true_rotation,
        mean_cos_x: moments[0].estimate(),
        mean_cos_y: moments[1].estimate(),
        mean_cos_x_plus_y: moments[2].estimate(),
        mean_cos_z: moments[3].estimate(),
        mean_cos_sum: moments[4].estimate(),
    };
    Ok((report, records))
}

/// [`monte_carlo`] with Haar-random true frames and no raw samples.
pub fn monte_carlo_error<T: Real>(
    a: &AliceState<T>,
    b: &FiducialState<T>,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloReport<T>> {
    monte_carlo(a, b, &MonteCarloOptions::new(samples, seed)).map(|(r, _)| r)
}
