//! Rotation-group machinery: Jacobi polynomials, Wigner matrices, Euler
//! angles in the zyz convention and classical rotation matrices.

mod jacobi;
mod rotation;
mod wigner;

pub use jacobi::jacobi_polynomial;
pub use rotation::{axis_cosines, error_angles, rotation_matrix, EulerAngles, RotationMatrix};
pub use wigner::{big_d, small_d, SmallDTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Basis label `|j, m>` with `|m| <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AngularIndex {
    pub j: u32,
    pub m: i32,
}

impl AngularIndex {
    pub fn new(j: u32, m: i32) -> Result<Self> {
        check_index(j, m)?;
        Ok(Self { j, m })
    }

    /// Position in the flattened basis `(0,0), (1,-1), (1,0), (1,1), (2,-2), ...`.
    #[inline]
    pub fn flat(self) -> usize {
        flat_index(self.j, self.m)
    }

    pub fn from_flat(idx: usize) -> Self {
        let j = (idx as f64).sqrt().floor() as u32;
        // guard against rounding at perfect squares
        let j = if ((j + 1) * (j + 1)) as usize <= idx { j + 1 } else { j };
        let m = idx as i64 - (j as i64) * (j as i64) - j as i64;
        Self { j, m: m as i32 }
    }
}

#[inline]
pub fn flat_index(j: u32, m: i32) -> usize {
    let j = j as i64;
    (j * j + j + m as i64) as usize
}

/// Dimension of the level with `n` angular-momentum blocks `j = 0..n-1`.
#[inline]
pub fn level_dimension(n: u32) -> usize {
    (n as usize) * (n as usize)
}

/// All basis labels of the level, in flattened order.
pub fn level_indices(n: u32) -> impl Iterator<Item = AngularIndex> {
    (0..n).flat_map(|j| (-(j as i32)..=j as i32).map(move |m| AngularIndex { j, m }))
}

#[inline]
pub(crate) fn check_index(j: u32, m: i32) -> Result<()> {
    if m.unsigned_abs() > j {
        return Err(Error::IndexOutOfRange {
            j: j as i64,
            m: m as i64,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_index_roundtrip() {
        for (i, idx) in level_indices(7).enumerate() {
            assert_eq!(idx.flat(), i);
            assert_eq!(AngularIndex::from_flat(i), idx);
        }
        assert_eq!(level_indices(7).count(), level_dimension(7));
    }

    #[test]
    fn rejects_m_beyond_j() {
        assert!(AngularIndex::new(1, 2).is_err());
        assert!(AngularIndex::new(0, -1).is_err());
        assert!(AngularIndex::new(3, -3).is_ok());
    }
}
