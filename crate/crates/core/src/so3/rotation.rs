//! Euler angles (zyz) and classical rotation matrices.

use std::ops::Mul;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Below this `|sin beta|` the first and last z-rotations are merged.
const GIMBAL_LOCK: f64 = 1e-10;

/// Euler angles with `alpha, gamma` in `[0, 2pi)` and `beta` in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> EulerAngles<T> {
    /// Normalizes by `2pi`-periodicity and `(a, -b, g) ~ (a + pi, b, g + pi)`.
    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        let pi = T::PI();
        let two_pi = pi + pi;
        let mut b = beta % two_pi;
        if b > pi {
            b -= two_pi;
        } else if b <= -pi {
            b += two_pi;
        }
        let (mut a, mut g) = (alpha, gamma);
        if b < T::zero() {
            b = -b;
            a += pi;
            g += pi;
        }
        Self {
            alpha: wrap_two_pi(a),
            beta: b,
            gamma: wrap_two_pi(g),
        }
    }

    pub fn identity() -> Self {
        Self {
            alpha: T::zero(),
            beta: T::zero(),
            gamma: T::zero(),
        }
    }

    /// Draws a rotation from the normalized Haar measure.
    pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let two_pi = T::lit(std::f64::consts::TAU);
        let alpha = T::lit(rng.random::<f64>()) * two_pi;
        let gamma = T::lit(rng.random::<f64>()) * two_pi;
        let cos_beta = T::lit(2.0 * rng.random::<f64>() - 1.0);
        Self::new(alpha, cos_beta.acos(), gamma)
    }

    pub fn to_matrix(&self) -> RotationMatrix<T> {
        rotation_matrix(self)
    }

    /// Euler angles of the composition `R(self) R(other)`.
    pub fn compose(&self, other: &Self) -> Self {
        (rotation_matrix(self) * rotation_matrix(other)).to_euler()
    }
}

fn wrap_two_pi<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut r = x % two_pi;
    if r < T::zero() {
        r += two_pi;
    }
    if r >= two_pi {
        r = T::zero();
    }
    r
}

/// Proper orthogonal 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationMatrix<T> {
    pub r: [[T; 3]; 3],
}

impl<T: Real> RotationMatrix<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            r: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    pub fn about_z(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self {
            r: [[c, -s, z], [s, c, z], [z, z, o]],
        }
    }

    pub fn about_y(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self {
            r: [[c, z, s], [z, o, z], [-s, z, c]],
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.r;
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.r[j][i];
            }
        }
        Self { r: t }
    }

    pub fn trace(&self) -> T {
        self.r[0][0] + self.r[1][1] + self.r[2][2]
    }

    pub fn determinant(&self) -> T {
        let r = &self.r;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// Largest deviation of `R^T R` from the identity.
    pub fn orthogonality_defect(&self) -> T {
        let p = self.transpose() * *self;
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((p.r[i][j] - want).abs());
            }
        }
        worst
    }

    pub fn apply(&self, v: [T; 3]) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| self.r[i][k] * v[k]).sum();
        }
        out
    }

    /// Single-rotation angle `Omega` from `trace R = 1 + 2 cos Omega`.
    pub fn rotation_angle(&self) -> T {
        let c = (self.trace() - T::one()) / T::lit(2.0);
        c.max(-T::one()).min(T::one()).acos()
    }

    /// Inverse of [`rotation_matrix`]; at gimbal lock `gamma = 0`.
    pub fn to_euler(&self) -> EulerAngles<T> {
        let r = &self.r;
        // R = Rz(a) Ry(b) Rz(c) with a = -alpha, c = -gamma
        let sin_b = r[0][2].hypot(r[1][2]);
        let b = sin_b.atan2(r[2][2]);
        let (a, c) = if sin_b >= T::lit(GIMBAL_LOCK) {
            (r[1][2].atan2(r[0][2]), r[2][1].atan2(-r[2][0]))
        } else if r[2][2] > T::zero() {
            (r[1][0].atan2(r[0][0]), T::zero())
        } else {
            ((-r[1][0]).atan2(r[1][1]), T::zero())
        };
        EulerAngles::new(-a, b, -c)
    }
}

impl<T: Real> Mul for RotationMatrix<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.r[i][k] * rhs.r[k][j]).sum();
            }
        }
        Self { r: out }
    }
}

/// `R(alpha, beta, gamma) = Rz(-alpha) Ry(beta) Rz(-gamma)`.
///
/// This is the rotation represented by `big_d` for the same angles, and it
/// satisfies `R_zz = cos beta`, `R_xx + R_yy = (1 + cos beta) cos(alpha + gamma)`.
pub fn rotation_matrix<T: Real>(angles: &EulerAngles<T>) -> RotationMatrix<T> {
    RotationMatrix::about_z(-angles.alpha)
        * RotationMatrix::about_y(angles.beta)
        * RotationMatrix::about_z(-angles.gamma)
}

/// Error rotation `R(true)^T R(estimate)` as Euler angles.
pub fn error_angles<T: Real>(true_rot: &EulerAngles<T>, estimate: &EulerAngles<T>) -> EulerAngles<T> {
    (rotation_matrix(true_rot).transpose() * rotation_matrix(estimate)).to_euler()
}

/// Cosines of the angles between each true axis and its estimate: the
/// diagonal of the error rotation.
pub fn axis_cosines<T: Real>(err: &EulerAngles<T>) -> (T, T, T) {
    let r = rotation_matrix(err).r;
    (r[0][0], r[1][1], r[2][2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: &RotationMatrix<f64>, b: &RotationMatrix<f64>, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| (a.r[i][j] - b.r[i][j]).abs() <= tol))
    }

    #[test]
    fn normalization() {
        let e = EulerAngles::new(-0.5_f64, -0.3, 7.0);
        assert!((e.alpha - (PI - 0.5)).abs() < 1e-15);
        assert!((e.beta - 0.3).abs() < 1e-15);
        assert!((e.gamma - (7.0 + PI - 2.0 * PI)).abs() < 1e-14);
        let r1 = rotation_matrix(&e);
        let r2 = RotationMatrix::about_z(0.5) * RotationMatrix::about_y(-0.3) * RotationMatrix::about_z(-7.0);
        assert!(close(&r1, &r2, 1e-14));
    }

    #[test]
    fn identity_angles() {
        assert!(close(
            &rotation_matrix(&EulerAngles::new(0.0, 0.0, 0.0)),
            &RotationMatrix::identity(),
            0.0
        ));
    }

    #[test]
    fn cosine_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let e = EulerAngles::<f64>::haar_random(&mut rng);
            let r = rotation_matrix(&e);
            assert!((r.r[2][2] - e.beta.cos()).abs() < 1e-14);
            let xy = (1.0 + e.beta.cos()) * (e.alpha + e.gamma).cos();
            assert!((r.r[0][0] + r.r[1][1] - xy).abs() < 1e-14);
            assert!(r.orthogonality_defect() < 1e-14);
            assert!((r.determinant() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn extraction_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let e = EulerAngles::<f64>::haar_random(&mut rng);
            let back = rotation_matrix(&e).to_euler();
            assert!(close(&rotation_matrix(&back), &rotation_matrix(&e), 1e-12));
        }
    }

    #[test]
    fn gimbal_lock_folds_into_alpha() {
        let e = EulerAngles::new(0.4_f64, 0.0, 1.1);
        let back = rotation_matrix(&e).to_euler();
        assert_eq!(back.gamma, 0.0);
        assert!((back.alpha - 1.5).abs() < 1e-14);

        let e = EulerAngles::new(0.4_f64, PI, 1.1);
        let back = rotation_matrix(&e).to_euler();
        assert_eq!(back.gamma, 0.0);
        assert!(close(&rotation_matrix(&back), &rotation_matrix(&e), 1e-14));
    }

    #[test]
    fn error_angles_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = EulerAngles::<f64>::haar_random(&mut rng);
            let y = EulerAngles::<f64>::haar_random(&mut rng);
            let same = error_angles(&x, &x);
            assert!(close(&rotation_matrix(&same), &RotationMatrix::identity(), 1e-12));
            let from_id = error_angles(&EulerAngles::identity(), &y);
            assert!(close(&rotation_matrix(&from_id), &rotation_matrix(&y), 1e-12));
            let err = error_angles(&x, &y);
            let want = rotation_matrix(&x).transpose() * rotation_matrix(&y);
            assert!(close(&rotation_matrix(&err), &want, 1e-12));
        }
    }

    #[test]
    fn axis_cosines_cases() {
        assert_eq!(axis_cosines(&EulerAngles::new(0.0, 0.0, 0.0)), (1.0, 1.0, 1.0));
        let (cx, cy, cz) = axis_cosines(&EulerAngles::new(0.0, PI, 0.0));
        assert!((cz + 1.0).abs() < 1e-15);
        assert!((cx + 1.0).abs() < 1e-15 && (cy - 1.0).abs() < 1e-15);
        let omega = rotation_matrix(&EulerAngles::new(0.0, PI, 0.0)).rotation_angle();
        assert!((cx + cy + cz - (1.0 + 2.0 * omega.cos())).abs() < 1e-14);
    }
}
