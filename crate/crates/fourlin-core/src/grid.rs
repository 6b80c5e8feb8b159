//! Uniform periodic grids on `[0,1]^d` and signed Fourier mode indexing.
//!
//! Grid points are `x = j/N`, `j ∈ {0,…,N−1}^d`, stored row-major with the
//! last axis fastest. A per-axis array index `i` maps to the signed mode
//! `m = i` for `i < ⌈N/2⌉` and `m = i − N` otherwise, so representable modes
//! satisfy `−⌊N/2⌋ ≤ m ≤ ⌈N/2⌉−1`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Spatial dimension and points-per-axis of a uniform periodic grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    d: usize,
    n: usize,
}

impl GridSpec {
    /// Build a spec, rejecting zero sizes and total point counts that
    /// overflow the platform's addressable size.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGridSpec("dimension d must be >= 1".to_string()));
        }
        if n == 0 {
            return Err(Error::InvalidGridSpec("grid size N must be >= 1".to_string()));
        }
        let len = n
            .checked_pow(d as u32)
            .ok_or(Error::GridOverflow { d, n })?;
        // 16 bytes per complex coefficient must stay allocatable.
        if len.checked_mul(16).is_none() || len > isize::MAX as usize / 16 {
            return Err(Error::GridOverflow { d, n });
        }
        Ok(Self { d, n })
    }

    /// Spatial dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Grid points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points, `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Always false; a valid spec has at least one point.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat-array stride of `axis` (last axis fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.d - 1 - axis) as u32)
    }

    /// Largest per-axis index mapping to a non-negative mode: `⌈N/2⌉`.
    pub fn half_up(&self) -> usize {
        self.n.div_ceil(2)
    }

    /// Largest mode magnitude representable without the even-grid Nyquist
    /// ambiguity: `⌈N/2⌉ − 1`.
    pub fn max_safe_mode(&self) -> usize {
        self.half_up() - 1
    }

    /// Signed mode component for per-axis index `i`.
    pub fn signed_component(&self, i: usize) -> i64 {
        if i < self.half_up() {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Per-axis index of the conjugate partner `(−m) mod N` of index `i`.
    pub fn conj_component(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.n - i
        }
    }

    /// Decompose a flat index into per-axis indices (row-major, last axis
    /// fastest), writing into `out`.
    pub fn unravel(&self, flat: usize, out: &mut [usize]) {
        let mut rest = flat;
        for axis in (0..self.d).rev() {
            out[axis] = rest % self.n;
            rest /= self.n;
        }
    }

    /// Flatten per-axis indices.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for &i in idx {
            flat = flat * self.n + i;
        }
        flat
    }

    /// Flat index of the conjugate partner of flat index `flat`.
    pub fn conj_flat(&self, flat: usize) -> usize {
        let mut rest = flat;
        let mut out = 0usize;
        let mut mul = 1usize;
        for _ in 0..self.d {
            let i = rest % self.n;
            rest /= self.n;
            out += self.conj_component(i) * mul;
            mul *= self.n;
        }
        out
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.n, self.d)
    }
}

/// A signed Fourier mode `m ∈ ℤ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mode {
    components: Vec<i64>,
}

impl Mode {
    pub fn new(components: Vec<i64>) -> Self {
        Self { components }
    }

    pub fn zero(d: usize) -> Self {
        Self { components: alloc::vec![0; d] }
    }

    pub fn components(&self) -> &[i64] {
        &self.components
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    /// ℓ∞ magnitude `max_j |m_j|`.
    pub fn linf(&self) -> u64 {
        self.components.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Squared Euclidean magnitude `|m|₂²`.
    pub fn l2_sq(&self) -> f64 {
        self.components.iter().map(|&c| (c as f64) * (c as f64)).sum()
    }

    /// The negated mode `−m`.
    pub fn neg(&self) -> Self {
        Self { components: self.components.iter().map(|c| -c).collect() }
    }

    /// True when any component sits on the even-grid Nyquist column `−N/2`,
    /// where `+N/2` and `−N/2` are indistinguishable.
    pub fn touches_nyquist(&self, spec: &GridSpec) -> bool {
        let n = spec.n();
        n % 2 == 0 && self.components.iter().any(|&c| c == -((n / 2) as i64))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.components.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Map per-axis array indices to the signed mode they represent.
pub fn mode_of_index(idx: &[usize], spec: &GridSpec) -> Result<Mode> {
    if idx.len() != spec.d() {
        return Err(Error::IndexOutOfRange(alloc::format!(
            "index has {} axes, spec has {}",
            idx.len(),
            spec.d()
        )));
    }
    let mut components = Vec::with_capacity(spec.d());
    for &i in idx {
        if i >= spec.n() {
            return Err(Error::IndexOutOfRange(alloc::format!(
                "per-axis index {i} out of range for N={}",
                spec.n()
            )));
        }
        components.push(spec.signed_component(i));
    }
    Ok(Mode::new(components))
}

/// Inverse of [`mode_of_index`]: per-axis indices of a representable mode.
pub fn index_of_mode(mode: &Mode, spec: &GridSpec) -> Result<Vec<usize>> {
    if mode.d() != spec.d() {
        return Err(Error::IndexOutOfRange(alloc::format!(
            "mode has {} axes, spec has {}",
            mode.d(),
            spec.d()
        )));
    }
    let n = spec.n() as i64;
    let lo = -(spec.n() as i64 / 2);
    let hi = spec.half_up() as i64 - 1;
    let mut idx = Vec::with_capacity(mode.d());
    for &m in mode.components() {
        if m < lo || m > hi {
            return Err(Error::IndexOutOfRange(alloc::format!(
                "mode component {m} not representable on N={} (range {lo}..={hi})",
                spec.n()
            )));
        }
        idx.push(m.rem_euclid(n) as usize);
    }
    Ok(idx)
}

/// Flat index of a representable mode.
pub fn flat_index_of_mode(mode: &Mode, spec: &GridSpec) -> Result<usize> {
    Ok(spec.ravel(&index_of_mode(mode, spec)?))
}

/// Real values of a periodic function sampled on the uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridField {
    /// Wrap raw values; rejects length mismatches and non-finite entries.
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGridSpec(alloc::format!(
                "expected {} values for grid {spec}, got {}",
                spec.len(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self { spec, values })
    }

    /// The constant field `u ≡ c`.
    pub fn constant(spec: GridSpec, c: f64) -> Result<Self> {
        Self::new(spec, alloc::vec![c; spec.len()])
    }

    /// Sample `f` at every grid point `x = j/N`.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.len());
        let mut idx = alloc::vec![0usize; spec.d()];
        let mut x = alloc::vec![0.0f64; spec.d()];
        for flat in 0..spec.len() {
            spec.unravel(flat, &mut idx);
            for (xj, &ij) in x.iter_mut().zip(idx.iter()) {
                *xj = ij as f64 / spec.n() as f64;
            }
            values.push(f(&x));
        }
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise sum of two fields on the same grid.
    pub fn add(&self, other: &GridField) -> Result<GridField> {
        check_same_spec(&self.spec, &other.spec)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a + b)
            .collect();
        GridField::new(self.spec, values)
    }

    /// Pointwise difference `self − other`.
    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        check_same_spec(&self.spec, &other.spec)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a - b)
            .collect();
        GridField::new(self.spec, values)
    }

    /// Pointwise scaling.
    pub fn scale(&self, c: f64) -> Result<GridField> {
        GridField::new(self.spec, self.values.iter().map(|v| c * v).collect())
    }
}

pub(crate) fn check_same_spec(expected: &GridSpec, got: &GridSpec) -> Result<()> {
    if expected != got {
        return Err(Error::SpecMismatch {
            expected: (expected.d(), expected.n()),
            got: (got.d(), got.n()),
        });
    }
    Ok(())
}
