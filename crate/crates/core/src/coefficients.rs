//! Closed-form expectation coefficients and the sparse tensor
//! `f[j,k,m,n,r,s]` with `<f> = sum f a*_{jm} b_{jr} a_{kn} b*_{ks}`.
//!
//! Throughout, `n` and `s` are magnetic quantum numbers of the `k` block,
//! never the principal quantum number of the level.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which axes of the frame are being transmitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective<T> {
    /// `<cos omega_z>`.
    ZAxis,
    /// `<cos omega_x + cos omega_y>`.
    XyAxes,
    /// `<cos omega_x + cos omega_y + cos omega_z>`.
    XyzAxes,
    /// `w_z <cos omega_z> + w_xy <cos omega_x + cos omega_y>`.
    Weighted { w_z: T, w_xy: T },
}

impl<T: Real> Objective<T> {
    pub fn weighted(w_z: T, w_xy: T) -> Result<Self> {
        let obj = Objective::Weighted { w_z, w_xy };
        obj.validate()?;
        Ok(obj)
    }

    pub fn validate(&self) -> Result<()> {
        if let Objective::Weighted { w_z, w_xy } = *self {
            if !(w_z >= T::zero() && w_xy >= T::zero()) || (w_z == T::zero() && w_xy == T::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "objective weights must be non-negative and not all zero (w_z = {w_z}, w_xy = {w_xy})"
                )));
            }
        }
        Ok(())
    }

    /// `(w_z, w_xy)`: weight of the z axis and of each of x and y.
    pub fn axis_weights(&self) -> (T, T) {
        match *self {
            Objective::ZAxis => (T::one(), T::zero()),
            Objective::XyAxes => (T::zero(), T::one()),
            Objective::XyzAxes => (T::one(), T::one()),
            Objective::Weighted { w_z, w_xy } => (w_z, w_xy),
        }
    }

    /// Total axis weight `K = w_z + 2 w_xy` (1, 2 or 3 for the plain objectives).
    pub fn axis_count(&self) -> T {
        let (w_z, w_xy) = self.axis_weights();
        w_z + w_xy + w_xy
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::ZAxis => "z",
            Objective::XyAxes => "xy",
            Objective::XyzAxes => "xyz",
            Objective::Weighted { .. } => "weighted",
        }
    }
}

fn check_mag(j: u32, k: u32, n: i32, s: i32) -> Result<()> {
    let top = j.max(k);
    for q in [n, s] {
        if q.unsigned_abs() > top {
            return Err(Error::IndexOutOfRange {
                j: top as i64,
                m: q as i64,
            });
        }
    }
    Ok(())
}

/// Clamped square root: radicands vanish exactly at the edge of the
/// representation and are never negative inside it.
fn root<T: Real>(x: i64) -> T {
    T::from_int(x.max(0)).sqrt()
}

/// `g[j,k]` for `<cos beta>`, evaluated at magnetic numbers `(n, s)`.
pub fn g_element<T: Real>(j: u32, k: u32, n: i32, s: i32) -> Result<T> {
    check_mag(j, k, n, s)?;
    let (n, s) = (n as i64, s as i64);
    Ok(if j == k {
        if j == 0 {
            T::zero()
        } else {
            let j = j as i64;
            T::from_int(n * s) / T::from_int(j * (j + 1))
        }
    } else if j.abs_diff(k) == 1 {
        let big = j.max(k) as i64;
        let num = (big * big - n * n) * (big * big - s * s);
        root::<T>(num) / T::from_int(4 * big * big - 1).sqrt() / T::from_int(big)
    } else {
        T::zero()
    })
}

/// `h[j,k]` for `<(1 + cos beta) exp(i(alpha + gamma))>`, at `(n, s)`.
///
/// Multiplies `a*_{j,n-1} b_{j,s-1} a_{kn} b*_{ks}`; `h` is not symmetric.
pub fn h_element<T: Real>(j: u32, k: u32, n: i32, s: i32) -> Result<T> {
    check_mag(j, k, n, s)?;
    let (n, s) = (n as i64, s as i64);
    let two = T::lit(2.0);
    Ok(if j == k {
        if j == 0 {
            T::zero()
        } else {
            let j = j as i64;
            root::<T>((j - n + 1) * (j + n) * (j - s + 1) * (j + s)) / (two * T::from_int(j * (j + 1)))
        }
    } else if j == k + 1 {
        let j = j as i64;
        root::<T>((j - n + 1) * (j - n) * (j - s + 1) * (j - s))
            / (two * T::from_int(j) * T::from_int(4 * j * j - 1).sqrt())
    } else if k == j + 1 {
        let j = k as i64;
        root::<T>((j + n - 1) * (j + n) * (j + s - 1) * (j + s))
            / (two * T::from_int(j) * T::from_int(4 * j * j - 1).sqrt())
    } else {
        T::zero()
    })
}

/// Index of a tensor entry, `(j, k, m, n, r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorKey {
    pub j: u32,
    pub k: u32,
    pub m: i32,
    pub n: i32,
    pub r: i32,
    pub s: i32,
}

impl TensorKey {
    pub fn new(j: u32, k: u32, m: i32, n: i32, r: i32, s: i32) -> Self {
        Self { j, k, m, n, r, s }
    }

    /// The entry that must hold the complex conjugate value.
    pub fn mirrored(&self) -> Self {
        Self::new(self.k, self.j, self.n, self.m, self.s, self.r)
    }

    fn valid(&self) -> bool {
        self.m.unsigned_abs() <= self.j
            && self.r.unsigned_abs() <= self.j
            && self.n.unsigned_abs() <= self.k
            && self.s.unsigned_abs() <= self.k
    }
}

/// Sparse map of nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCoefficientTensor<T> {
    j_max: u32,
    objective: Option<Objective<T>>,
    entries: BTreeMap<TensorKey, Complex<T>>,
}

impl<T: Real> SparseCoefficientTensor<T> {
    pub fn empty(j_max: u32, objective: Option<Objective<T>>) -> Self {
        Self {
            j_max,
            objective,
            entries: BTreeMap::new(),
        }
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Number of angular-momentum blocks, `j_max + 1`.
    pub fn level(&self) -> u32 {
        self.j_max + 1
    }

    pub fn objective(&self) -> Option<&Objective<T>> {
        self.objective.as_ref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &TensorKey) -> Complex<T> {
        self.entries.get(key).copied().unwrap_or_else(Complex::default)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&TensorKey, &Complex<T>)> {
        self.entries.iter()
    }

    /// Adds `value` at `key`; entries that cancel to zero are removed.
    pub fn add(&mut self, key: TensorKey, value: Complex<T>) -> Result<()> {
        if !key.valid() || key.j > self.j_max || key.k > self.j_max {
            return Err(Error::IndexOutOfRange {
                j: key.j.max(key.k) as i64,
                m: [key.m, key.n, key.r, key.s]
                    .into_iter()
                    .map(|x| x.abs())
                    .max()
                    .unwrap_or(0) as i64,
            });
        }
        let slot = self.entries.entry(key).or_default();
        *slot += value;
        if *slot == Complex::default() {
            self.entries.remove(&key);
        }
        Ok(())
    }

    /// `self + scale * other`.
    pub fn add_scaled(&mut self, other: &Self, scale: T) -> Result<()> {
        if other.j_max != self.j_max {
            return Err(Error::DimensionMismatch {
                expected: self.j_max as usize,
                found: other.j_max as usize,
            });
        }
        for (key, v) in &other.entries {
            self.add(*key, *v * scale)?;
        }
        Ok(())
    }

    /// Largest `|f(key) - conj(f(mirror(key)))|`.
    pub fn hermiticity_defect(&self) -> T {
        self.entries
            .iter()
            .map(|(key, v)| (*v - self.get(&key.mirrored()).conj()).norm())
            .fold(T::zero(), T::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&TensorDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TensorDocument<T> = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Serialized form: `{j_max, objective, entries: [[j,k,m,n,r,s,value], ...]}`,
/// with `[..., re, im]` for the rare complex entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TensorDocument<T> {
    pub j_max: u32,
    pub objective: Option<Objective<T>>,
    pub entries: Vec<EntryDocument<T>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Real")]
pub enum EntryDocument<T> {
    Real(u32, u32, i32, i32, i32, i32, T),
    Complex(u32, u32, i32, i32, i32, i32, T, T),
}

impl<T: Real> From<&SparseCoefficientTensor<T>> for TensorDocument<T> {
    fn from(t: &SparseCoefficientTensor<T>) -> Self {
        let entries = t
            .entries
            .iter()
            .map(|(k, v)| {
                if v.im == T::zero() {
                    EntryDocument::Real(k.j, k.k, k.m, k.n, k.r, k.s, v.re)
                } else {
                    EntryDocument::Complex(k.j, k.k, k.m, k.n, k.r, k.s, v.re, v.im)
                }
            })
            .collect();
        Self {
            j_max: t.j_max,
            objective: t.objective,
            entries,
        }
    }
}

impl<T: Real> TryFrom<TensorDocument<T>> for SparseCoefficientTensor<T> {
    type Error = Error;

    fn try_from(doc: TensorDocument<T>) -> Result<Self> {
        let mut t = Self::empty(doc.j_max, doc.objective);
        for e in doc.entries {
            let (key, v) = match e {
                EntryDocument::Real(j, k, m, n, r, s, re) => {
                    (TensorKey::new(j, k, m, n, r, s), Complex::new(re, T::zero()))
                }
                EntryDocument::Complex(j, k, m, n, r, s, re, im) => {
                    (TensorKey::new(j, k, m, n, r, s), Complex::new(re, im))
                }
            };
            t.add(key, v)?;
        }
        Ok(t)
    }
}

/// `<cos beta>` pattern: `f = delta_{mn} delta_{rs} g[j,k](n, s)`.
pub fn z_axis_tensor<T: Real>(j_max: u32) -> SparseCoefficientTensor<T> {
    let mut t = SparseCoefficientTensor::empty(j_max, Some(Objective::ZAxis));
    for j in 0..=j_max {
        for k in j.saturating_sub(1)..=(j + 1).min(j_max) {
            let lo = j.min(k) as i32;
            for n in -lo..=lo {
                for s in -lo..=lo {
                    let v = g_element::<T>(j, k, n, s).expect("indices within both blocks");
                    if v != T::zero() {
                        t.add(TensorKey::new(j, k, n, n, s, s), Complex::new(v, T::zero()))
                            .expect("valid key");
                    }
                }
            }
        }
    }
    t
}

/// `<(1 + cos beta) cos(alpha + gamma)>` pattern:
/// `f = delta_{m,n-1} delta_{r,s-1} h[j,k](n,s) + delta_{n,m-1} delta_{s,r-1} h[k,j](m,r)`.
pub fn xy_axes_tensor<T: Real>(j_max: u32) -> SparseCoefficientTensor<T> {
    let mut t = SparseCoefficientTensor::empty(j_max, Some(Objective::XyAxes));
    for j in 0..=j_max {
        for k in j.saturating_sub(1)..=(j + 1).min(j_max) {
            let (jj, kk) = (j as i32, k as i32);
            for n in -kk..=kk {
                for s in -kk..=kk {
                    let (m, r) = (n - 1, s - 1);
                    if m.abs() <= jj && r.abs() <= jj {
                        let v = h_element::<T>(j, k, n, s).expect("indices within block k");
                        if v != T::zero() {
                            t.add(TensorKey::new(j, k, m, n, r, s), Complex::new(v, T::zero()))
                                .expect("valid key");
                        }
                    }
                    let (m, r) = (n + 1, s + 1);
                    if m.abs() <= jj && r.abs() <= jj {
                        let v = h_element::<T>(k, j, m, r).expect("indices within block j");
                        if v != T::zero() {
                            t.add(TensorKey::new(j, k, m, n, r, s), Complex::new(v, T::zero()))
                                .expect("valid key");
                        }
                    }
                }
            }
        }
    }
    t
}

/// Coefficient tensor for an objective on the level with `j = 0..=j_max`.
pub fn assemble_tensor<T: Real>(objective: Objective<T>, j_max: u32) -> Result<SparseCoefficientTensor<T>> {
    objective.validate()?;
    let (w_z, w_xy) = objective.axis_weights();
    let mut t = SparseCoefficientTensor::empty(j_max, Some(objective));
    if w_z != T::zero() {
        t.add_scaled(&z_axis_tensor(j_max), w_z)?;
    }
    if w_xy != T::zero() {
        t.add_scaled(&xy_axes_tensor(j_max), w_xy)?;
    }
    Ok(t)
}
