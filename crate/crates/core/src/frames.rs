//! Weighted sets of directions reduced to three orthogonal axes, and the
//! matching generalized objective.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::coefficients::{xy_axes_tensor, z_axis_tensor, SparseCoefficientTensor};
use crate::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::objective::expectation;
use crate::quadrature::{make_grid, CoefficientOracle};
use crate::scalar::Real;
use crate::so3::rotation_matrix;
use crate::states::{AliceState, FiducialState};

/// Directions `e^mu` with positive weights `w_mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WeightedVectorSet<T> {
    vectors: Vec<[T; 3]>,
    weights: Vec<T>,
}

impl<T: Real> WeightedVectorSet<T> {
    pub fn new(vectors: Vec<[T; 3]>, weights: Vec<T>) -> Result<Self> {
        if vectors.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: weights.len(),
            });
        }
        if vectors.is_empty() {
            return Err(Error::Empty("weighted vector set"));
        }
        let tol = T::lit(1e-12).max(T::norm_tolerance());
        for (i, v) in vectors.iter().enumerate() {
            let norm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
            if (norm - T::one()).abs() > tol {
                return Err(Error::NotNormalized(format!("vector {i} has length {norm}")));
            }
        }
        if let Some(w) = weights.iter().find(|w| !(**w > T::zero())) {
            return Err(Error::InvalidArgument(format!("weights must be positive, got {w}")));
        }
        Ok(Self { vectors, weights })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text)?;
        Self::new(raw.vectors, raw.weights)
    }

    pub fn vectors(&self) -> &[[T; 3]] {
        &self.vectors
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// Symmetric positive-semidefinite `3x3` matrix `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GramLikeMatrix<T> {
    pub c: [[T; 3]; 3],
}

impl<T: Real> GramLikeMatrix<T> {
    pub fn new(c: [[T; 3]; 3]) -> Result<Self> {
        let scale = c.iter().flatten().fold(T::one(), |acc, x| acc.max(x.abs()));
        for i in 0..3 {
            for j in 0..i {
                if (c[i][j] - c[j][i]).abs() > T::lit(1e-14).max(T::norm_tolerance()) * scale {
                    return Err(Error::InvalidArgument(format!("C not symmetric at ({i},{j})")));
                }
            }
        }
        let eig = symmetric_eigen(&flatten(&c), 3);
        if eig.values[0] < -T::lit(1e-12).max(T::norm_tolerance()) * scale {
            return Err(Error::InvalidArgument(format!(
                "C has negative eigenvalue {}",
                eig.values[0]
            )));
        }
        Ok(Self { c })
    }

    pub fn diagonal(d: [T; 3]) -> Result<Self> {
        let z = T::zero();
        Self::new([[d[0], z, z], [z, d[1], z], [z, z, d[2]]])
    }

    pub fn trace(&self) -> T {
        self.c[0][0] + self.c[1][1] + self.c[2][2]
    }
}

fn flatten<T: Real>(c: &[[T; 3]; 3]) -> Vec<T> {
    c.iter().flatten().copied().collect()
}

/// `C_{mn} = sum_mu w_mu e^mu_m e^mu_n`.
pub fn build_c<T: Real>(set: &WeightedVectorSet<T>) -> Result<GramLikeMatrix<T>> {
    let mut c = [[T::zero(); 3]; 3];
    for (v, w) in set.vectors.iter().zip(&set.weights) {
        for m in 0..3 {
            for n in 0..3 {
                c[m][n] += *w * v[m] * v[n];
            }
        }
    }
    GramLikeMatrix::new(c)
}

/// Orthonormal axes with non-negative weights, in descending weight order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AxisReduction<T> {
    pub axes: [[T; 3]; 3],
    pub weights: [T; 3],
}

impl<T: Real> AxisReduction<T> {
    /// `sum_k weight_k axis_k axis_k^T`.
    pub fn reconstruct(&self) -> [[T; 3]; 3] {
        let mut c = [[T::zero(); 3]; 3];
        for (axis, w) in self.axes.iter().zip(&self.weights) {
            for m in 0..3 {
                for n in 0..3 {
                    c[m][n] += *w * axis[m] * axis[n];
                }
            }
        }
        c
    }
}

fn dot<T: Real>(x: &[T; 3], y: &[T; 3]) -> T {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// Diagonalizes `C`.
///
/// Within a degenerate eigenspace the axes are the Gram-Schmidt
/// orthonormalized projections of `x`, `y`, `z` taken in that order, so the
/// identity reduces to the standard basis. Otherwise each axis has its
/// largest-magnitude component positive.
pub fn reduce_to_axes<T: Real>(c: &GramLikeMatrix<T>) -> AxisReduction<T> {
    let eig = symmetric_eigen(&flatten(&c.c), 3);
    let scale = eig.values.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let tie = T::lit(1e-10).max(T::norm_tolerance()) * scale;
    // descending
    let order = [2usize, 1, 0];
    let values: Vec<T> = order.iter().map(|&k| eig.values[k].max(T::zero())).collect();
    let vectors: Vec<[T; 3]> = order
        .iter()
        .map(|&k| [eig.vectors[0][k], eig.vectors[1][k], eig.vectors[2][k]])
        .collect();

    let mut axes: Vec<[T; 3]> = Vec::with_capacity(3);
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (values[start] - values[end]).abs() <= tie {
            end += 1;
        }
        let group = &vectors[start..end];
        if group.len() == 1 {
            let mut v = group[0];
            let lead = (0..3).fold(0, |best, i| {
                if v[i].abs() > v[best].abs() + T::lit(1e-12) {
                    i
                } else {
                    best
                }
            });
            if v[lead] < T::zero() {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            axes.push(v);
        } else {
            let mut chosen: Vec<[T; 3]> = Vec::new();
            for unit in 0..3 {
                if chosen.len() == group.len() {
                    break;
                }
                let mut e = [T::zero(); 3];
                e[unit] = T::one();
                // projection onto the eigenspace, minus what is already chosen
                let mut p = [T::zero(); 3];
                for g in group {
                    let w = dot(g, &e);
                    for i in 0..3 {
                        p[i] += w * g[i];
                    }
                }
                for q in &chosen {
                    let w = dot(q, &p);
                    for i in 0..3 {
                        p[i] -= w * q[i];
                    }
                }
                let norm = dot(&p, &p).sqrt();
                if norm > T::lit(1e-6) {
                    chosen.push([p[0] / norm, p[1] / norm, p[2] / norm]);
                }
            }
            axes.extend(chosen);
        }
        start = end;
    }
    AxisReduction {
        axes: [axes[0], axes[1], axes[2]],
        weights: [values[0], values[1], values[2]],
    }
}

/// Coefficient tensors of the nine rotation-matrix entries `R_{mn}` at one
/// level, built on first use.
#[derive(Debug)]
pub struct RotationEntryTensors<T> {
    j_max: u32,
    z: SparseCoefficientTensor<T>,
    xy: SparseCoefficientTensor<T>,
    entries: [[std::sync::OnceLock<SparseCoefficientTensor<T>>; 3]; 3],
}

impl<T: Real> RotationEntryTensors<T> {
    pub fn new(j_max: u32) -> Self {
        Self {
            j_max,
            z: z_axis_tensor(j_max),
            xy: xy_axes_tensor(j_max),
            entries: Default::default(),
        }
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Tensor of `R_{mn}` computed by quadrature.
    pub fn entry(&self, m: usize, n: usize) -> &SparseCoefficientTensor<T> {
        self.entries[m][n].get_or_init(|| {
            let grid = make_grid(self.j_max);
            let oracle = CoefficientOracle::new(
                |e| Complex::new(rotation_matrix(e).r[m][n], T::zero()),
                self.j_max,
                &grid,
            );
            oracle.tensor(T::epsilon() * T::lit(64.0))
        })
    }

    /// Tensor of `sum_{mn} C_{mn} R_{mn}`: the `zz` and `xx + yy` parts in
    /// closed form, the rest by quadrature.
    pub fn weighted_tensor(&self, c: &GramLikeMatrix<T>) -> Result<SparseCoefficientTensor<T>> {
        let c = &c.c;
        let half = T::lit(0.5);
        let mut t = SparseCoefficientTensor::empty(self.j_max, None);
        t.add_scaled(&self.z, c[2][2])?;
        t.add_scaled(&self.xy, half * (c[0][0] + c[1][1]))?;
        let diff = half * (c[0][0] - c[1][1]);
        if diff != T::zero() {
            t.add_scaled(self.entry(0, 0), diff)?;
            t.add_scaled(self.entry(1, 1), -diff)?;
        }
        for m in 0..3 {
            for n in 0..3 {
                if m != n && c[m][n] != T::zero() {
                    t.add_scaled(self.entry(m, n), c[m][n])?;
                }
            }
        }
        Ok(t)
    }

    pub fn expectation(&self, a: &AliceState<T>, b: &FiducialState<T>, c: &GramLikeMatrix<T>) -> Result<T> {
        if a.n() != self.j_max + 1 {
            return Err(Error::DimensionMismatch {
                expected: (self.j_max + 1) as usize,
                found: a.n() as usize,
            });
        }
        expectation(&self.weighted_tensor(c)?, a, b)
    }
}

/// `sum_{mn} <R_{mn}> C_{mn}` for the pair `(a, b)`.
pub fn weighted_objective_expectation<T: Real>(
    a: &AliceState<T>,
    b: &FiducialState<T>,
    c: &GramLikeMatrix<T>,
) -> Result<T> {
    RotationEntryTensors::new(a.n().saturating_sub(1)).expectation(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{assemble_tensor, Objective};
    use crate::quadrature::integrate;
    use crate::simulator::error_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn c_examples() {
        let set = WeightedVectorSet::new(vec![[0.0, 0.0, 1.0]], vec![1.0]).unwrap();
        assert_eq!(
            build_c(&set).unwrap().c,
            [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
        );
        let axes =
            WeightedVectorSet::new(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], vec![1.0; 3]).unwrap();
        assert_eq!(
            build_c(&axes).unwrap().c,
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        );
        let s = 0.5f64.sqrt();
        let tilted = WeightedVectorSet::new(vec![[0.0, 0.0, 1.0], [s, 0.0, s]], vec![1.0, 2.0]).unwrap();
        let c = build_c(&tilted).unwrap();
        assert!((c.trace() - 3.0).abs() < 1e-15);
        assert_eq!(c.c[0][2], c.c[2][0]);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(WeightedVectorSet::<f64>::new(vec![], vec![]).is_err());
        assert!(WeightedVectorSet::new(vec![[1.0, 1.0, 0.0]], vec![1.0]).is_err());
        assert!(WeightedVectorSet::new(vec![[1.0, 0.0, 0.0]], vec![0.0]).is_err());
        assert!(WeightedVectorSet::new(vec![[1.0, 0.0, 0.0]], vec![1.0, 2.0]).is_err());
        assert!(GramLikeMatrix::new([[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(GramLikeMatrix::diagonal([1.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn json_input() {
        let set =
            WeightedVectorSet::<f64>::from_json(r#"{"vectors": [[1,0,0],[0,0,1]], "weights": [2, 0.5]}"#).unwrap();
        assert_eq!(set.total_weight(), 2.5);
        assert!(WeightedVectorSet::<f64>::from_json(r#"{"vectors": [[2,0,0]], "weights": [1]}"#).is_err());
    }

    #[test]
    fn reduction_canonical_forms() {
        let id = reduce_to_axes(&GramLikeMatrix::diagonal([1.0, 1.0, 1.0]).unwrap());
        assert_eq!(id.weights, [1.0, 1.0, 1.0]);
        assert_eq!(id.axes, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let r = reduce_to_axes(&GramLikeMatrix::diagonal([1.0, 3.0, 2.0]).unwrap());
        assert_eq!(r.weights, [3.0, 2.0, 1.0]);
        for (axis, want) in r
            .axes
            .iter()
            .zip([[0.0f64, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        {
            assert!(axis.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-14));
        }
        // degenerate pair in the xy plane
        let flat = reduce_to_axes(&GramLikeMatrix::diagonal([2.0, 2.0, 0.5]).unwrap());
        assert_eq!(flat.axes[0], [1.0, 0.0, 0.0]);
        assert_eq!(flat.axes[1], [0.0, 1.0, 0.0]);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        use rand::Rng;
        for _ in 0..50 {
            let k = rng.random_range(1..6);
            let vectors: Vec<[f64; 3]> = (0..k)
                .map(|_| {
                    let v: [f64; 3] = [
                        rng.random::<f64>() - 0.5,
                        rng.random::<f64>() - 0.5,
                        rng.random::<f64>() - 0.5,
                    ];
                    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    [v[0] / n, v[1] / n, v[2] / n]
                })
                .collect();
            let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.1).collect();
            let set = WeightedVectorSet::new(vectors, weights).unwrap();
            let c = build_c(&set).unwrap();
            let red = reduce_to_axes(&c);
            let back = red.reconstruct();
            for m in 0..3 {
                for n in 0..3 {
                    assert!((back[m][n] - c.c[m][n]).abs() < 1e-12);
                }
            }
            assert!((red.weights.iter().sum::<f64>() - set.total_weight()).abs() < 1e-12);
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(&red.axes[i], &red.axes[j]) - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn weighted_expectation_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = AliceState::<f64>::random(2, &mut rng).unwrap();
        let b = FiducialState::<f64>::random(2, &mut rng).unwrap();
        let z = expectation(&assemble_tensor(Objective::ZAxis, 1).unwrap(), &a, &b).unwrap();
        let xyz = expectation(&assemble_tensor(Objective::XyzAxes, 1).unwrap(), &a, &b).unwrap();
        let cz = GramLikeMatrix::diagonal([0.0, 0.0, 1.0]).unwrap();
        assert!((weighted_objective_expectation(&a, &b, &cz).unwrap() - z).abs() < 1e-14);
        let id = GramLikeMatrix::diagonal([1.0, 1.0, 1.0]).unwrap();
        assert!((weighted_objective_expectation(&a, &b, &id).unwrap() - xyz).abs() < 1e-14);

        let c = GramLikeMatrix::new([[1.0, 0.3, -0.2], [0.3, 0.5, 0.1], [-0.2, 0.1, 0.8]]).unwrap();
        let got = weighted_objective_expectation(&a, &b, &c).unwrap();
        let want = integrate(
            |e| {
                let r = rotation_matrix(e).r;
                let f: f64 = (0..3)
                    .flat_map(|m| (0..3).map(move |n| (m, n)))
                    .map(|(m, n)| c.c[m][n] * r[m][n])
                    .sum();
                Complex::new(error_density(&a, &b, e).unwrap() * f, 0.0)
            },
            &make_grid(1),
        );
        assert!((got - want.re).abs() < 1e-10, "{got} {}", want.re);
    }
}
