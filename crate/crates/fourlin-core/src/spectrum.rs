//! DFT coefficients of grid fields and the spectral norms built on them.
//!
//! The forward transform carries the full `1/N^d` factor,
//! `coeff(m) = (1/N^d)·Σ_{x∈G} u(x)·e^{−2πi⟨m,x⟩}`, so a coefficient is
//! directly the grid approximation of the Fourier coefficient
//! `⟨φ_{−m}, u⟩ = ∫ u(x) e^{−2πi⟨m,x⟩} dx`. The inverse carries no factor:
//! `u(x) = Σ_m coeff(m)·e^{2πi⟨m,x⟩}`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use crate::error::{Error, Result};
use crate::fft::transform_axes;
use crate::math;
use crate::grid::{GridField, GridSpec, Mode};

/// Default point cap for the naive `O((N^d)²)` summation oracle.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

/// Relative imaginary-residue tolerance when realizing a real field from a
/// conjugate-symmetric spectrum; FFT round-off floor at these problem sizes.
pub const REALIZE_RESIDUE_TOL: f64 = 1e-12;

/// Complex DFT coefficients on an `N^d` grid, indexed like the grid itself;
/// the array position of signed mode `m` is given by
/// [`crate::grid::index_of_mode`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectrumField {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.len() {
            return Err(Error::InvalidGridSpec(alloc::format!(
                "expected {} coefficients for grid {spec}, got {}",
                spec.len(),
                coeffs.len()
            )));
        }
        Ok(Self { spec, coeffs })
    }

    pub fn zero(spec: GridSpec) -> Self {
        Self { spec, coeffs: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at signed mode `m`; errors if `m` is not representable.
    pub fn coeff_at(&self, mode: &Mode) -> Result<Complex64> {
        Ok(self.coeffs[crate::grid::flat_index_of_mode(mode, &self.spec)?])
    }

    /// `Σ_m |coeff(m)|²`; equals the grid L² norm by discrete Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest deviation `|coeff((−m) mod N) − conj(coeff(m))|` from
    /// Hermitian symmetry.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for flat in 0..self.coeffs.len() {
            let partner = self.spec.conj_flat(flat);
            let dev = (self.coeffs[partner] - self.coeffs[flat].conj()).norm();
            if dev > worst {
                worst = dev;
            }
        }
        worst
    }
}

/// Forward DFT of a real grid field, FFT-accelerated.
pub fn dft_forward(u: &GridField) -> Result<SpectrumField> {
    let spec = *u.spec();
    let mut coeffs: Vec<Complex64> =
        u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_axes(&mut coeffs, &spec, false);
    let scale = 1.0 / spec.len() as f64;
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    SpectrumField::new(spec, coeffs)
}

/// Inverse DFT realized as a real grid field.
///
/// The complex inverse is computed first; if its imaginary residue exceeds
/// `REALIZE_RESIDUE_TOL` relative to the field's L² scale the spectrum was
/// not conjugate-symmetric and a symmetry-violation error is returned.
pub fn dft_inverse(s: &SpectrumField) -> Result<GridField> {
    let spec = *s.spec();
    let mut buf = s.coeffs().to_vec();
    transform_axes(&mut buf, &spec, true);

    let norm_sq: f64 = buf.iter().map(|z| z.norm_sqr()).sum::<f64>() / spec.len() as f64;
    let scale = math::sqrt(norm_sq);
    let max_imag = buf.iter().map(|z| math::fabs(z.im)).fold(0.0f64, f64::max);
    let tolerance = REALIZE_RESIDUE_TOL * scale;
    if max_imag > tolerance {
        return Err(Error::SymmetryViolation { max_imag, tolerance });
    }
    GridField::new(spec, buf.iter().map(|z| z.re).collect())
}

/// Inverse DFT without the realization step; used where complex output is
/// explicitly wanted.
pub fn dft_inverse_complex(s: &SpectrumField) -> Vec<Complex64> {
    let mut buf = s.coeffs().to_vec();
    transform_axes(&mut buf, s.spec(), true);
    buf
}

/// Forward DFT by direct double summation; the test oracle for
/// [`dft_forward`]. Capped at [`DEFAULT_ORACLE_CAP`] points.
pub fn dft_naive(u: &GridField) -> Result<SpectrumField> {
    dft_naive_with_cap(u, DEFAULT_ORACLE_CAP)
}

/// [`dft_naive`] with an explicit point cap.
pub fn dft_naive_with_cap(u: &GridField, cap: usize) -> Result<SpectrumField> {
    let spec = *u.spec();
    if spec.len() > cap {
        return Err(Error::OracleCapExceeded { points: spec.len(), cap });
    }
    let n = spec.n();
    let d = spec.d();
    let roots = unit_roots(n);
    let scale = 1.0 / spec.len() as f64;

    let mut coeffs = vec![Complex64::new(0.0, 0.0); spec.len()];
    let mut k_idx = vec![0usize; d];
    let mut x_idx = vec![0usize; d];
    for (flat_k, coeff) in coeffs.iter_mut().enumerate() {
        spec.unravel(flat_k, &mut k_idx);
        let mut acc = Complex64::new(0.0, 0.0);
        for (flat_x, &value) in u.values().iter().enumerate() {
            spec.unravel(flat_x, &mut x_idx);
            // Phase −2π·(Σ_j m_j x_j)/N with m_j the signed mode of k_idx;
            // m_j and m_j mod N give the same root.
            let mut phase = 0usize;
            for (kj, xj) in k_idx.iter().zip(x_idx.iter()) {
                phase = (phase + kj * xj) % n;
            }
            acc += value * roots[phase];
        }
        *coeff = acc * scale;
    }
    SpectrumField::new(spec, coeffs)
}

/// `e^{−2πi r/N}` for `r < N`.
fn unit_roots(n: usize) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(n);
    for r in 0..n {
        let angle = -2.0 * core::f64::consts::PI * (r as f64) / (n as f64);
        roots.push(Complex64::new(math::cos(angle), math::sin(angle)));
    }
    roots
}

/// Squared grid L² norm `(1/N^d)·Σ_x u(x)²`.
pub fn grid_l2_norm_sq(u: &GridField) -> f64 {
    u.values().iter().map(|v| v * v).sum::<f64>() / u.spec().len() as f64
}

/// Squared Sobolev norm of order `s`, computed spectrally:
/// `Σ_m |coeff(m)|² · Π_j Σ_{k=0..s} (2π m_j)^{2k}`,
/// i.e. the sum of `‖∂^k u‖²_{L²}` over multi-indices with `|k|_∞ ≤ s`,
/// using `∂^k φ_m = Π_j (2πi m_j)^{k_j} φ_m`.
pub fn sobolev_norm_sq(s_field: &SpectrumField, s: u32) -> f64 {
    let spec = s_field.spec();
    let d = spec.d();
    let mut idx = vec![0usize; d];
    let mut total = 0.0f64;
    for (flat, c) in s_field.coeffs().iter().enumerate() {
        let sq = c.norm_sqr();
        if sq == 0.0 {
            continue;
        }
        spec.unravel(flat, &mut idx);
        let mut weight = 1.0f64;
        for &i in &idx {
            let m = spec.signed_component(i) as f64;
            let w = math::powi(2.0 * core::f64::consts::PI * m, 2);
            // Σ_{k=0..s} w^k
            let mut axis_sum = 1.0f64;
            let mut pw = 1.0f64;
            for _ in 0..s {
                pw *= w;
                axis_sum += pw;
            }
            weight *= axis_sum;
        }
        total += sq * weight;
    }
    total
}

/// The normalized character sum `(1/N^d)·Σ_{x∈G} e^{2πi⟨k−m,x⟩}` by direct
/// summation. Equals `1[k ≡ m (mod N)]` for any mode magnitudes.
pub fn grid_character_sum(k: &Mode, m: &Mode, spec: &GridSpec) -> Complex64 {
    let n = spec.n();
    let d = spec.d();
    debug_assert_eq!(k.d(), d);
    debug_assert_eq!(m.d(), d);
    // e^{+2πi r/N}: conjugate of the forward root table.
    let roots: Vec<Complex64> = unit_roots(n).iter().map(|z| z.conj()).collect();
    let diff: Vec<usize> = k
        .components()
        .iter()
        .zip(m.components().iter())
        .map(|(&kj, &mj)| (kj - mj).rem_euclid(n as i64) as usize)
        .collect();

    let mut idx = vec![0usize; d];
    let mut acc = Complex64::new(0.0, 0.0);
    for flat in 0..spec.len() {
        spec.unravel(flat, &mut idx);
        let mut phase = 0usize;
        for (dj, xj) in diff.iter().zip(idx.iter()) {
            phase = (phase + dj * xj) % n;
        }
        acc += roots[phase];
    }
    acc / spec.len() as f64
}
