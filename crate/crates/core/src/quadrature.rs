//! Normalized Haar-measure quadrature on SO(3).
//!
//! Gauss-Legendre in `cos beta` times uniform trapezoid grids in `alpha` and
//! `gamma`. For the trigonometric-polynomial integrands that appear here
//! (products of two Wigner matrices with `j, k <= j_max` and a weight of low
//! Fourier degree) the rule is exact up to rounding.

use num_complex::Complex;

use crate::coefficients::{SparseCoefficientTensor, TensorKey};
use crate::error::Result;
use crate::scalar::Real;
use crate::so3::{big_d, check_index, EulerAngles, SmallDTable};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(count: usize) -> Vec<(T, T)> {
    let mut nodes = vec![(T::zero(), T::zero()); count];
    let nf = T::from_int(count as i64);
    let one = T::one();
    for i in 0..count.div_ceil(2) {
        let mut z = (T::PI() * (T::from_int(i as i64) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = one;
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, T::zero());
            for k in 1..=count {
                let kf = T::from_int(k as i64);
                let p2 = p1;
                p1 = p0;
                p0 = ((kf + kf - one) * z * p1 - (kf - one) * p2) / kf;
            }
            dp = nf * (z * p0 - p1) / (z * z - one);
            let step = p0 / dp;
            z -= step;
            if step.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let w = T::lit(2.0) / ((one - z * z) * dp * dp);
        nodes[i] = (-z, w);
        nodes[count - 1 - i] = (z, w);
    }
    if count % 2 == 1 {
        nodes[count / 2].0 = T::zero();
    }
    nodes
}

/// Product grid for the normalized Haar measure `sin b da db dg / 8 pi^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SO3Grid<T> {
    /// `(cos beta, weight)`; weights sum to 2.
    pub beta_nodes: Vec<(T, T)>,
    pub alpha_count: usize,
    pub gamma_count: usize,
}

impl<T: Real> SO3Grid<T> {
    pub fn with_counts(beta_count: usize, alpha_count: usize, gamma_count: usize) -> Self {
        Self {
            beta_nodes: gauss_legendre(beta_count.max(1)),
            alpha_count: alpha_count.max(1),
            gamma_count: gamma_count.max(1),
        }
    }

    /// Same rule with every node count doubled.
    pub fn refined(&self) -> Self {
        Self::with_counts(2 * self.beta_nodes.len(), 2 * self.alpha_count, 2 * self.gamma_count)
    }

    pub fn len(&self) -> usize {
        self.beta_nodes.len() * self.alpha_count * self.gamma_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> T {
        let mut acc = CompensatedSum::default();
        for (_, w) in self.nodes() {
            acc.add(w);
        }
        acc.value()
    }

    fn angle(count: usize, i: usize) -> T {
        T::lit(std::f64::consts::TAU) * T::from_int(i as i64) / T::from_int(count as i64)
    }

    pub fn alpha(&self, i: usize) -> T {
        Self::angle(self.alpha_count, i)
    }

    pub fn gamma(&self, i: usize) -> T {
        Self::angle(self.gamma_count, i)
    }

    /// Every node with its normalized weight; weights sum to one.
    pub fn nodes(&self) -> impl Iterator<Item = (EulerAngles<T>, T)> + '_ {
        let uniform = T::one() / T::from_int((self.alpha_count * self.gamma_count) as i64);
        self.beta_nodes.iter().flat_map(move |&(x, w)| {
            let beta = x.acos();
            let wb = w / T::lit(2.0) * uniform;
            (0..self.alpha_count).flat_map(move |ia| {
                (0..self.gamma_count).map(move |ig| {
                    (
                        EulerAngles {
                            alpha: self.alpha(ia),
                            beta,
                            gamma: self.gamma(ig),
                        },
                        wb,
                    )
                })
            })
        })
    }
}

/// Grid exact for products `D^j conj(D^k) f` with `j, k <= j_max` and `f`
/// of Fourier degree at most 2 in each angle.
pub fn make_grid<T: Real>(j_max: u32) -> SO3Grid<T> {
    let j = j_max as usize;
    SO3Grid::with_counts(2 * j + 3, 4 * j + 4, 4 * j + 4)
}

/// Normalized Haar integral by brute-force summation over the grid.
pub fn integrate<T, F>(f: F, grid: &SO3Grid<T>) -> Complex<T>
where
    T: Real,
    F: Fn(&EulerAngles<T>) -> Complex<T>,
{
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for (e, w) in grid.nodes() {
        let v = f(&e) * w;
        re.add(v.re);
        im.add(v.im);
    }
    Complex::new(re.value(), im.value())
}

/// Neumaier summation; grids reach 10^4-10^5 nodes.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub(crate) fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// `f[j,k,m,n,r,s] = sqrt((2j+1)(2k+1)) * int D^j_{mr} conj(D^k_{ns}) f`,
/// one coefficient by direct summation.
#[allow(clippy::too_many_arguments)]
pub fn coefficient_oracle<T, F>(
    f: F,
    j: u32,
    k: u32,
    m: i32,
    n: i32,
    r: i32,
    s: i32,
    grid: &SO3Grid<T>,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&EulerAngles<T>) -> Complex<T>,
{
    check_index(j, m)?;
    check_index(j, r)?;
    check_index(k, n)?;
    check_index(k, s)?;
    let integral = integrate(
        |e| {
            let dj = big_d(j, m, r, e).expect("checked");
            let dk = big_d(k, n, s, e).expect("checked");
            dj * dk.conj() * f(e)
        },
        grid,
    );
    Ok(integral * dimension_factor::<T>(j, k))
}

fn dimension_factor<T: Real>(j: u32, k: u32) -> T {
    T::from_int(((2 * j + 1) * (2 * k + 1)) as i64).sqrt()
}

/// Quadrature oracle for all coefficients of one weight function.
///
/// The weight is sampled once on the grid and reduced to per-`beta` Fourier
/// coefficients in `alpha` and `gamma`; each coefficient is then a single
/// sum over the `beta` nodes.
#[derive(Debug, Clone)]
pub struct CoefficientOracle<T> {
    j_max: u32,
    beta_weights: Vec<T>,
    tables: Vec<SmallDTable<T>>,
    /// `fourier[i][(p + P) * (2P + 1) + (q + P)]`, `P = 2 j_max`.
    fourier: Vec<Vec<Complex<T>>>,
}

impl<T: Real> CoefficientOracle<T> {
    pub fn new<F>(f: F, j_max: u32, grid: &SO3Grid<T>) -> Self
    where
        F: Fn(&EulerAngles<T>) -> Complex<T>,
    {
        let p_max = 2 * j_max as i32;
        let width = (2 * p_max + 1) as usize;
        let norm = T::one() / T::from_int((grid.alpha_count * grid.gamma_count) as i64);
        let mut beta_weights = Vec::with_capacity(grid.beta_nodes.len());
        let mut tables = Vec::with_capacity(grid.beta_nodes.len());
        let mut fourier = Vec::with_capacity(grid.beta_nodes.len());
        for &(x, w) in &grid.beta_nodes {
            let beta = x.acos();
            beta_weights.push(w / T::lit(2.0));
            tables.push(SmallDTable::new(j_max, beta));
            let samples: Vec<Vec<Complex<T>>> = (0..grid.alpha_count)
                .map(|ia| {
                    (0..grid.gamma_count)
                        .map(|ig| {
                            f(&EulerAngles {
                                alpha: grid.alpha(ia),
                                beta,
                                gamma: grid.gamma(ig),
                            })
                        })
                        .collect()
                })
                .collect();
            let mut coeffs = vec![Complex::default(); width * width];
            for p in -p_max..=p_max {
                // partial transform over gamma for each alpha row
                for q in -p_max..=p_max {
                    let mut acc = Complex::default();
                    for (ia, row) in samples.iter().enumerate() {
                        let pa = T::from_int(p as i64) * grid.alpha(ia);
                        for (ig, v) in row.iter().enumerate() {
                            let arg = pa + T::from_int(q as i64) * grid.gamma(ig);
                            acc += *v * Complex::new(arg.cos(), arg.sin());
                        }
                    }
                    coeffs[(p + p_max) as usize * width + (q + p_max) as usize] = acc * norm;
                }
            }
            fourier.push(coeffs);
        }
        Self {
            j_max,
            beta_weights,
            tables,
            fourier,
        }
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn coefficient(&self, j: u32, k: u32, m: i32, n: i32, r: i32, s: i32) -> Result<Complex<T>> {
        check_index(j, m)?;
        check_index(j, r)?;
        check_index(k, n)?;
        check_index(k, s)?;
        if j > self.j_max || k > self.j_max {
            return Err(crate::Error::IndexOutOfRange {
                j: j.max(k) as i64,
                m: self.j_max as i64,
            });
        }
        let p_max = 2 * self.j_max as i32;
        let width = (2 * p_max + 1) as usize;
        let slot = (m - n + p_max) as usize * width + (r - s + p_max) as usize;
        let mut acc: Complex<T> = Complex::default();
        for ((w, table), coeffs) in self.beta_weights.iter().zip(&self.tables).zip(&self.fourier) {
            acc += coeffs[slot] * (*w * table.get(j, m, r) * table.get(k, n, s));
        }
        Ok(acc * dimension_factor::<T>(j, k))
    }

    /// Every coefficient with modulus above `threshold`, as a sparse tensor.
    pub fn tensor(&self, threshold: T) -> SparseCoefficientTensor<T> {
        let mut t = SparseCoefficientTensor::empty(self.j_max, None);
        for key in all_keys(self.j_max) {
            let v = self
                .coefficient(key.j, key.k, key.m, key.n, key.r, key.s)
                .expect("key in range");
            if v.norm() > threshold {
                t.add(key, v).expect("key in range");
            }
        }
        t
    }
}

/// Every index tuple `(j,k,m,n,r,s)` with `j, k <= j_max`.
pub fn all_keys(j_max: u32) -> impl Iterator<Item = TensorKey> {
    let block = move |j: u32| {
        let jj = j as i32;
        (-jj..=jj).flat_map(move |m| (-jj..=jj).map(move |r| (j, m, r)))
    };
    (0..=j_max).flat_map(block).flat_map(move |(j, m, r)| {
        (0..=j_max)
            .flat_map(block)
            .map(move |(k, n, s)| TensorKey::new(j, k, m, n, r, s))
    })
}
