use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::OptimizationResult;
use crate::coefficients::SparseCoefficientTensor;
use crate::error::{Error, Result};
use crate::objective::contract;
use crate::scalar::Real;
use crate::states::{normalize_block, AliceState, FiducialState};

/// Largest level accepted by [`direct_search_optimize`].
pub const DIRECT_SEARCH_MAX_N: u32 = 4;

#[derive(Debug, Clone, Copy)]
pub struct PowellOptions<T> {
    /// Relative decrease per sweep below which the search stops.
    pub ftol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for PowellOptions<T> {
    fn default() -> Self {
        Self {
            ftol: T::epsilon() * T::lit(1e3),
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowellOutcome<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Powell's conjugate direction method with Brent line searches.
pub fn powell_minimize<T: Real, F: FnMut(&[T]) -> T>(mut f: F, x0: Vec<T>, opts: PowellOptions<T>) -> PowellOutcome<T> {
    let dim = x0.len();
    let tiny = T::lit(1e-25);
    let mut p = x0;
    let mut directions: Vec<Vec<T>> = (0..dim)
        .map(|i| {
            let mut e = vec![T::zero(); dim];
            e[i] = T::one();
            e
        })
        .collect();
    let mut fret = f(&p);
    let mut pt = p.clone();

    for iter in 1..=opts.max_iter {
        let fp = fret;
        let mut ibig = 0;
        let mut del = T::zero();
        for (i, dir) in directions.iter_mut().enumerate() {
            let before = fret;
            fret = line_minimize(&mut f, &mut p, dir);
            if before - fret > del {
                del = before - fret;
                ibig = i;
            }
        }
        if T::lit(2.0) * (fp - fret) <= opts.ftol * (fp.abs() + fret.abs()) + tiny {
            return PowellOutcome {
                x: p,
                value: fret,
                iterations: iter,
                converged: true,
            };
        }
        let extrapolated: Vec<T> = p.iter().zip(&pt).map(|(a, b)| T::lit(2.0) * *a - *b).collect();
        let mut xit: Vec<T> = p.iter().zip(&pt).map(|(a, b)| *a - *b).collect();
        pt.clone_from(&p);
        let fptt = f(&extrapolated);
        if fptt < fp {
            let t =
                T::lit(2.0) * (fp - T::lit(2.0) * fret + fptt) * (fp - fret - del).powi(2) - del * (fp - fptt).powi(2);
            if t < T::zero() {
                fret = line_minimize(&mut f, &mut p, &mut xit);
                directions[ibig] = directions[dim - 1].clone();
                directions[dim - 1] = xit;
            }
        }
    }
    PowellOutcome {
        x: p,
        value: fret,
        iterations: opts.max_iter,
        converged: false,
    }
}

/// Minimizes along `dir` from `p`; moves `p` to the minimum and rescales
/// `dir` to the step taken.
fn line_minimize<T: Real, F: FnMut(&[T]) -> T>(f: &mut F, p: &mut [T], dir: &mut [T]) -> T {
    let mut trial = p.to_vec();
    let mut along = |t: T| {
        for ((x, p0), d) in trial.iter_mut().zip(p.iter()).zip(dir.iter()) {
            *x = *p0 + t * *d;
        }
        f(&trial)
    };
    let (ax, bx, cx) = bracket(&mut along, T::zero(), T::one());
    let (tmin, fmin) = brent(&mut along, ax, bx, cx, T::epsilon().sqrt() * T::lit(2.0), 200);
    for (x, d) in p.iter_mut().zip(dir.iter_mut()) {
        *d *= tmin;
        *x += *d;
    }
    fmin
}

fn bracket<T: Real, F: FnMut(T) -> T>(f: &mut F, mut a: T, mut b: T) -> (T, T, T) {
    let gold = T::lit(1.618034);
    let glimit = T::lit(100.0);
    let tiny = T::lit(1e-20);
    let mut fa = f(a);
    let mut fb = f(b);
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + gold * (b - a);
    let mut fc = f(c);
    let mut guard = 0;
    while fb > fc && guard < 200 {
        guard += 1;
        let r = (b - a) * (fb - fc);
        let q = (b - c) * (fb - fa);
        let denom = T::lit(2.0) * (q - r).abs().max(tiny).copysign(q - r);
        let mut u = b - ((b - c) * q - (b - a) * r) / denom;
        let ulim = b + glimit * (c - b);
        let mut fu;
        if (b - u) * (u - c) > T::zero() {
            fu = f(u);
            if fu < fc {
                return (b, u, c);
            } else if fu > fb {
                return (a, b, u);
            }
            u = c + gold * (c - b);
            fu = f(u);
        } else if (c - u) * (u - ulim) > T::zero() {
            fu = f(u);
            if fu < fc {
                b = c;
                c = u;
                u = c + gold * (c - b);
                fb = fc;
                fc = fu;
                fu = f(u);
            }
        } else if (u - ulim) * (ulim - c) >= T::zero() {
            u = ulim;
            fu = f(u);
        } else {
            u = c + gold * (c - b);
            fu = f(u);
        }
        a = b;
        b = c;
        c = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    let _ = fa;
    (a, b, c)
}

fn brent<T: Real, F: FnMut(T) -> T>(f: &mut F, ax: T, bx: T, cx: T, tol: T, max_iter: usize) -> (T, T) {
    let cgold = T::lit(0.381_966_011_250_105_1);
    let zeps = T::epsilon() * T::lit(1e-3);
    let half = T::lit(0.5);
    let mut a = ax.min(cx);
    let mut b = ax.max(cx);
    let mut x = bx;
    let mut w = bx;
    let mut v = bx;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d = T::zero();
    let mut e = T::zero();
    for _ in 0..max_iter {
        let xm = half * (a + b);
        let tol1 = tol * x.abs() + zeps;
        let tol2 = T::lit(2.0) * tol1;
        if (x - xm).abs() <= tol2 - half * (b - a) {
            break;
        }
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = T::lit(2.0) * (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() >= (half * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x) {
                e = if x >= xm { a - x } else { b - x };
                d = cgold * e;
            } else {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
            }
        } else {
            e = if x >= xm { a - x } else { b - x };
            d = cgold * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

fn unpack<T: Real>(n: u32, x: &[T], real_only: bool) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let d = (n * n) as usize;
    let coeff = |base: usize, i: usize| {
        if real_only {
            Complex::new(x[base + i], T::zero())
        } else {
            Complex::new(x[2 * base + 2 * i], x[2 * base + 2 * i + 1])
        }
    };
    let mut a: Vec<Complex<T>> = (0..d).map(|i| coeff(0, i)).collect();
    let norm = a.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    if norm > T::zero() {
        a.iter_mut().for_each(|c| *c /= norm);
    }
    let mut b: Vec<Complex<T>> = (0..d).map(|i| coeff(d, i)).collect();
    for j in 0..n {
        normalize_block(j, &mut b[(j * j) as usize..((j + 1) * (j + 1)) as usize]);
    }
    (a, b)
}

/// Maximizes `a^dagger M(b) a` jointly over `a` and `b` by derivative-free
/// search from `restarts` random starting points. Only meant as an
/// independent check on the fixed-point iteration at small `n`.
pub fn direct_search_optimize<T: Real>(
    tensor: &SparseCoefficientTensor<T>,
    n: u32,
    restarts: usize,
    seed: u64,
) -> Result<OptimizationResult<T>> {
    search(tensor, n, restarts, seed, false)
}

/// [`direct_search_optimize`] restricted to real coefficients.
pub fn direct_search_optimize_real<T: Real>(
    tensor: &SparseCoefficientTensor<T>,
    n: u32,
    restarts: usize,
    seed: u64,
) -> Result<OptimizationResult<T>> {
    search(tensor, n, restarts, seed, true)
}

fn search<T: Real>(
    tensor: &SparseCoefficientTensor<T>,
    n: u32,
    restarts: usize,
    seed: u64,
    real_only: bool,
) -> Result<OptimizationResult<T>> {
    if n == 0 || n > DIRECT_SEARCH_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "direct search supports 1 <= n <= {DIRECT_SEARCH_MAX_N}, got {n}"
        )));
    }
    if tensor.level() != n {
        return Err(Error::DimensionMismatch {
            expected: n as usize,
            found: tensor.level() as usize,
        });
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let d = (n * n) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<PowellOutcome<T>> = None;
    let mut trajectory = Vec::with_capacity(restarts);
    let mut total_iterations = 0;
    for _ in 0..restarts {
        let params = if real_only { 2 * d } else { 4 * d };
        let x0: Vec<T> = (0..params)
            .map(|_| T::lit(<StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)))
            .collect();
        let outcome = powell_minimize(
            |x| {
                let (a, b) = unpack(n, x, real_only);
                -contract(tensor, &a, &b)
            },
            x0,
            PowellOptions::default(),
        );
        total_iterations += outcome.iterations;
        trajectory.push(-outcome.value);
        if best.as_ref().is_none_or(|b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart");
    let (a, b) = unpack(n, &best.x, real_only);
    let a = AliceState::normalized(n, a)?.canonical();
    let mut b = b;
    crate::states::fix_global_phase(&mut b);
    let b = FiducialState::new(n, b)?;
    let lambda = contract(tensor, a.coefficients(), b.coefficients());
    Ok(OptimizationResult {
        a,
        b,
        lambda,
        lambda_trajectory: trajectory,
        iterations: total_iterations,
        converged: best.converged,
        degenerate_blocks: Vec::new(),
    })
}
