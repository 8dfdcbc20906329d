//! Dense symmetric and Hermitian eigensolvers.
//!
//! Householder tridiagonalization followed by the implicit QL algorithm
//! (the EISPACK `tred2`/`tql2` pair). Hermitian matrices are solved through
//! the real symmetric embedding `[[Re, -Im], [Im, Re]]`.

use num_complex::Complex;

use crate::scalar::Real;

/// Eigenvalues ascending; `vectors[i][k]` is component `i` of eigenvector `k`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

/// Full decomposition of the symmetric `dim x dim` row-major matrix.
pub fn symmetric_eigen<T: Real>(matrix: &[T], dim: usize) -> SymmetricEigen<T> {
    assert_eq!(matrix.len(), dim * dim, "matrix must be dim x dim");
    if dim == 0 {
        return SymmetricEigen {
            values: vec![],
            vectors: vec![],
        };
    }
    let mut v: Vec<Vec<T>> = (0..dim).map(|i| matrix[i * dim..(i + 1) * dim].to_vec()).collect();
    let mut d = vec![T::zero(); dim];
    let mut e = vec![T::zero(); dim];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);
    SymmetricEigen { values: d, vectors: v }
}

fn tred2<T: Real>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    d.copy_from_slice(&v[n - 1]);
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = zero;
                v[j][i] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let delta = f * e[k] + g * d[k];
                    v[k][j] -= delta;
                }
                d[j] = v[i - 1][j];
                v[i][j] = zero;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for row in v.iter().take(i + 1) {
                    g += row[i + 1] * row[j];
                }
                for k in 0..=i {
                    let delta = g * d[k];
                    v[k][j] -= delta;
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = zero;
    }
    v[n - 1][n - 1] = T::one();
    e[0] = zero;
}

fn tql2<T: Real>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] == 0 always terminates the scan
        let m = m.min(n - 1);

        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }

    // selection sort, ascending
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, dj) in d.iter().enumerate().skip(i + 1) {
            if *dj < p {
                k = j;
                p = *dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in v.iter_mut() {
                row.swap(i, k);
            }
        }
    }
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian row-major matrix.
pub fn hermitian_top_eigenpair<T: Real>(matrix: &[Complex<T>], dim: usize) -> (T, Vec<Complex<T>>) {
    assert_eq!(matrix.len(), dim * dim, "matrix must be dim x dim");
    if matrix.iter().all(|c| c.im == T::zero()) {
        let real: Vec<T> = matrix.iter().map(|c| c.re).collect();
        let eig = symmetric_eigen(&real, dim);
        let top = dim - 1;
        let vec = eig
            .vectors
            .iter()
            .map(|row| Complex::new(row[top], T::zero()))
            .collect();
        return (eig.values[top], vec);
    }
    // [[A, -B], [B, A]] for H = A + iB; (x, y) -> x + iy
    let wide = 2 * dim;
    let mut real = vec![T::zero(); wide * wide];
    for i in 0..dim {
        for j in 0..dim {
            let h = matrix[i * dim + j];
            real[i * wide + j] = h.re;
            real[(i + dim) * wide + j + dim] = h.re;
            real[i * wide + j + dim] = -h.im;
            real[(i + dim) * wide + j] = h.im;
        }
    }
    let eig = symmetric_eigen(&real, wide);
    let top = wide - 1;
    let mut vec: Vec<Complex<T>> = (0..dim)
        .map(|i| Complex::new(eig.vectors[i][top], eig.vectors[i + dim][top]))
        .collect();
    let norm = vec.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    for c in &mut vec {
        *c /= norm;
    }
    (eig.values[top], vec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    #[test]
    fn matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &n in &[1usize, 2, 3, 7, 20, 64] {
            let a = random_symmetric(&mut rng, n);
            let ours = symmetric_eigen(&a, n);
            let mut theirs: Vec<f64> = DMatrix::from_row_slice(n, n, &a)
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            theirs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (x, y) in ours.values.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-12, "n={n}");
            }
            // A v = lambda v and V^T V = I
            for k in 0..n {
                for i in 0..n {
                    let av: f64 = (0..n).map(|j| a[i * n + j] * ours.vectors[j][k]).sum();
                    assert!((av - ours.values[k] * ours.vectors[i][k]).abs() < 1e-12);
                }
                for k2 in 0..n {
                    let dot: f64 = (0..n).map(|i| ours.vectors[i][k] * ours.vectors[i][k2]).sum();
                    assert!((dot - if k == k2 { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn degenerate_and_diagonal() {
        let a = [3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0];
        let eig = symmetric_eigen(&a, 3);
        assert_eq!(eig.values, vec![1.0, 3.0, 3.0]);
        let z = [0.0; 4];
        assert_eq!(symmetric_eigen(&z, 2).values, vec![0.0, 0.0]);
    }

    #[test]
    fn one_by_one() {
        let (l, v) = hermitian_top_eigenpair(&[Complex::new(0.7_f64, 0.0)], 1);
        assert_eq!(l, 0.7);
        assert!((v[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for &n in &[2usize, 5, 16, 40] {
            let mut h = vec![Complex::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..=i {
                    let z = if i == j {
                        Complex::new(rng.random_range(-1.0..1.0), 0.0)
                    } else {
                        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    };
                    h[i * n + j] = z;
                    h[j * n + i] = z.conj();
                }
            }
            let (l, v) = hermitian_top_eigenpair(&h, n);
            let resid: f64 = (0..n)
                .map(|i| ((0..n).map(|j| h[i * n + j] * v[j]).sum::<Complex<f64>>() - v[i] * l).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-10, "n={n}: {resid}");
            let want = DMatrix::from_row_slice(n, n, &h).symmetric_eigen().eigenvalues.max();
            assert!((l - want).abs() < 1e-12);
        }
    }
}
