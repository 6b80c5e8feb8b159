//! Diagonal-in-Fourier operators `T = Σ_{|m|∞≤K} λ_m φ_m ⊗ φ_{−m}` and the
//! datasets they generate.
//!
//! Applying `T` to a grid field is FFT → multiply by `λ` on the kept modes
//! (zero elsewhere) → inverse FFT, which evaluates
//! `Tv = Σ_m λ_m ⟨φ_{−m},v⟩ φ_m` exactly for band-limited `v`. The grid must
//! resolve the operator's modes without collision, `N > 2K`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::grf::{sample_grf, sample_noise, GrfConfig};
use crate::grid::{check_same_spec, GridField, GridSpec, Mode};
use crate::math;
use crate::seed::derive;
use crate::spectrum::{
    dft_inverse, dft_forward, dft_naive_with_cap, SpectrumField, DEFAULT_ORACLE_CAP,
    REALIZE_RESIDUE_TOL,
};

/// Tolerance (relative to the parameter bound) for detecting the
/// conjugate-symmetry of a parameter sequence; fitted operators are
/// symmetric only up to accumulation error.
const CONJ_DETECT_TOL: f64 = 1e-9;

/// Slack allowed on the `|λ| ≤ C` constraint to absorb rounding in callers
/// that project exactly onto the disk.
const BOUND_SLACK: f64 = 1e-12;

/// The parameter sequence `{λ_m : |m|_∞ ≤ K}` with bound `C`; modes outside
/// the box are implicitly zero. Parameters are stored lexicographically over
/// `m ∈ {−K..K}^d` (last axis fastest), the same order as the FOP1 format.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    d: usize,
    k: usize,
    bound: f64,
    lambdas: Vec<Complex64>,
    real_output: bool,
}

impl DiagonalOperator {
    /// Number of stored parameters, `(2K+1)^d`.
    pub fn box_len(d: usize, k: usize) -> Result<usize> {
        (2 * k + 1)
            .checked_pow(d as u32)
            .ok_or(Error::GridOverflow { d, n: 2 * k + 1 })
    }

    /// Wrap a parameter sequence; validates `|λ_m| ≤ C` and detects whether
    /// the sequence is conjugate-symmetric (the real-output flag).
    pub fn new(d: usize, k: usize, bound: f64, lambdas: Vec<Complex64>) -> Result<Self> {
        if !(bound > 0.0) {
            return Err(Error::InvalidParameter(String::from("bound C must be > 0")));
        }
        let len = Self::box_len(d, k)?;
        if lambdas.len() != len {
            return Err(Error::InvalidParameter(alloc::format!(
                "expected {len} parameters for K={k}, d={d}, got {}",
                lambdas.len()
            )));
        }
        let max_mod = lambdas.iter().map(|l| l.norm()).fold(0.0f64, f64::max);
        if max_mod > bound * (1.0 + BOUND_SLACK) + BOUND_SLACK {
            return Err(Error::InvalidParameter(alloc::format!(
                "parameter modulus {max_mod} exceeds bound C={bound}"
            )));
        }
        let mut op = Self { d, k, bound, lambdas, real_output: false };
        op.real_output = op.conjugate_symmetry_deviation() <= CONJ_DETECT_TOL * bound.max(1.0);
        Ok(op)
    }

    /// The zero operator on the given box.
    pub fn zero(d: usize, k: usize, bound: f64) -> Result<Self> {
        let len = Self::box_len(d, k)?;
        Self::new(d, k, bound, vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Truncation level K.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Parameter bound C.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Whether `λ_{−m} = conj(λ_m)` holds, i.e. real fields map to real
    /// fields.
    pub fn real_output(&self) -> bool {
        self.real_output
    }

    /// Stored parameters in lexicographic mode order.
    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    fn box_side(&self) -> usize {
        2 * self.k + 1
    }

    /// Storage index of a mode inside the box, or `None` outside it.
    pub fn box_index(&self, mode: &[i64]) -> Option<usize> {
        if mode.len() != self.d {
            return None;
        }
        let side = self.box_side() as i64;
        let mut flat = 0i64;
        for &c in mode {
            if c.unsigned_abs() > self.k as u64 {
                return None;
            }
            flat = flat * side + (c + self.k as i64);
        }
        Some(flat as usize)
    }

    /// Mode components of storage index `flat`.
    pub fn mode_of_box_index(&self, flat: usize) -> Vec<i64> {
        let side = self.box_side();
        let mut rest = flat;
        let mut comps = vec![0i64; self.d];
        for axis in (0..self.d).rev() {
            comps[axis] = (rest % side) as i64 - self.k as i64;
            rest /= side;
        }
        comps
    }

    /// `λ_m`, zero for modes outside the box.
    pub fn lambda(&self, mode: &[i64]) -> Complex64 {
        match self.box_index(mode) {
            Some(i) => self.lambdas[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Largest deviation `|λ_{−m} − conj(λ_m)|` over the box.
    pub fn conjugate_symmetry_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for flat in 0..self.lambdas.len() {
            let mode = self.mode_of_box_index(flat);
            let neg: Vec<i64> = mode.iter().map(|c| -c).collect();
            let partner = self.box_index(&neg).expect("negation stays in the box");
            let dev = (self.lambdas[partner] - self.lambdas[flat].conj()).norm();
            if dev > worst {
                worst = dev;
            }
        }
        worst
    }

    /// Restriction to a smaller box `|m|_∞ ≤ k_new` (identical parameters on
    /// shared modes, zero beyond).
    pub fn truncate(&self, k_new: usize) -> Result<Self> {
        if k_new >= self.k {
            return Ok(self.clone());
        }
        let len = Self::box_len(self.d, k_new)?;
        let mut lambdas = Vec::with_capacity(len);
        let side = 2 * k_new + 1;
        for flat in 0..len {
            let mut rest = flat;
            let mut comps = vec![0i64; self.d];
            for axis in (0..self.d).rev() {
                comps[axis] = (rest % side) as i64 - k_new as i64;
                rest /= side;
            }
            lambdas.push(self.lambda(&comps));
        }
        Self::new(self.d, k_new, self.bound, lambdas)
    }
}

/// Multiply a spectrum by the operator's parameters: the kept modes carry
/// `λ_m·v̂(m)`, everything else (including modes the operator does not
/// store) becomes zero. This is the complex-output route; no realization is
/// attempted.
pub fn apply_to_spectrum(t: &DiagonalOperator, v_hat: &SpectrumField) -> Result<SpectrumField> {
    let spec = *v_hat.spec();
    if spec.d() != t.d() {
        return Err(Error::SpecMismatch { expected: (t.d(), 0), got: (spec.d(), spec.n()) });
    }
    if spec.n() <= 2 * t.k() {
        return Err(Error::ResolutionTooCoarse { n: spec.n(), k: t.k() });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    let mut idx = vec![0usize; spec.d()];
    let mut mode = vec![0i64; spec.d()];
    for (flat, slot) in out.iter_mut().enumerate() {
        spec.unravel(flat, &mut idx);
        let mut inside = true;
        for (mc, &i) in mode.iter_mut().zip(idx.iter()) {
            let m = spec.signed_component(i);
            if m.unsigned_abs() > t.k() as u64 {
                inside = false;
                break;
            }
            *mc = m;
        }
        if inside {
            if let Some(bi) = t.box_index(&mode) {
                *slot = t.lambdas()[bi] * v_hat.coeffs()[flat];
            }
        }
    }
    SpectrumField::new(spec, out)
}

/// Apply the operator to a real grid field at the field's own resolution:
/// FFT, multiply on the kept modes, inverse FFT. Errors if the grid cannot
/// resolve the operator (`N ≤ 2K`) or if the result is not real.
pub fn apply(t: &DiagonalOperator, v: &GridField) -> Result<GridField> {
    let v_hat = dft_forward(v)?;
    let w_hat = apply_to_spectrum(t, &v_hat)?;
    dft_inverse(&w_hat)
}

/// Term-by-term oracle for [`apply`]: evaluates
/// `w(x) = Σ_{|m|∞≤K} λ_m · DFT(v)(−m) · e^{2πi⟨m,x⟩}` pointwise from the
/// naive DFT. Capped at [`DEFAULT_ORACLE_CAP`] points.
pub fn apply_direct(t: &DiagonalOperator, v: &GridField) -> Result<GridField> {
    let spec = *v.spec();
    if spec.n() <= 2 * t.k() {
        return Err(Error::ResolutionTooCoarse { n: spec.n(), k: t.k() });
    }
    let v_hat = dft_naive_with_cap(v, DEFAULT_ORACLE_CAP)?;
    let n = spec.n();
    let tau = 2.0 * core::f64::consts::PI / n as f64;

    let box_len = t.lambdas().len();
    let mut x_idx = vec![0usize; spec.d()];
    let mut out = Vec::with_capacity(spec.len());
    let mut max_imag = 0.0f64;
    let mut norm_sq = 0.0f64;
    for flat_x in 0..spec.len() {
        spec.unravel(flat_x, &mut x_idx);
        let mut acc = Complex64::new(0.0, 0.0);
        for bi in 0..box_len {
            let mode = t.mode_of_box_index(bi);
            let lam = t.lambdas()[bi];
            if lam == Complex64::new(0.0, 0.0) {
                continue;
            }
            let coeff = v_hat
                .coeff_at(&Mode::new(mode.clone()))
                .expect("box modes are representable when N > 2K");
            let mut phase = 0i64;
            for (mj, &xj) in mode.iter().zip(x_idx.iter()) {
                phase += mj * xj as i64;
            }
            let angle = tau * phase.rem_euclid(n as i64) as f64;
            acc += lam * coeff * Complex64::new(math::cos(angle), math::sin(angle));
        }
        max_imag = max_imag.max(math::fabs(acc.im));
        norm_sq += acc.norm_sqr();
        out.push(acc);
    }
    let scale = math::sqrt(norm_sq / spec.len() as f64);
    let tolerance = REALIZE_RESIDUE_TOL * scale;
    if max_imag > tolerance {
        return Err(Error::SymmetryViolation { max_imag, tolerance });
    }
    GridField::new(spec, out.iter().map(|z| z.re).collect())
}

/// Draw a random operator with `λ_m ~ Unif(−bound, bound)`.
///
/// With `real_output` set (the default pipeline), parameters are drawn on a
/// half-space of modes and mirrored, `λ_{−m} = λ_m`, so real inputs map to
/// real outputs. Without it, each mode independently receives a complex
/// parameter of modulus `Unif(0, bound)` and uniform phase.
pub fn synthesize_random_operator(
    d: usize,
    k: usize,
    bound: f64,
    seed: u64,
    real_output: bool,
) -> Result<DiagonalOperator> {
    if !(bound > 0.0) {
        return Err(Error::InvalidParameter(String::from("bound must be > 0")));
    }
    let len = DiagonalOperator::box_len(d, k)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut lambdas = vec![Complex64::new(0.0, 0.0); len];
    if real_output {
        let probe = DiagonalOperator::zero(d, k, bound)?;
        for flat in 0..len {
            let mode = probe.mode_of_box_index(flat);
            let neg: Vec<i64> = mode.iter().map(|c| -c).collect();
            let partner = probe.box_index(&neg).expect("negation stays in the box");
            if partner < flat {
                continue;
            }
            let value = Complex64::new(rng.gen_range(-bound..bound), 0.0);
            lambdas[flat] = value;
            lambdas[partner] = value;
        }
    } else {
        for slot in lambdas.iter_mut() {
            let modulus = rng.gen_range(0.0..bound);
            let phase = rng.gen_range(0.0..(2.0 * core::f64::consts::PI));
            *slot = Complex64::from_polar(modulus, phase);
        }
    }
    DiagonalOperator::new(d, k, bound, lambdas)
}

/// The heat solution operator `exp(τ∇²)` restricted to `|m|_∞ ≤ K`:
/// `λ_m = exp(−4π²τ|m|₂²)`, real and symmetric, with bound 1.
pub fn heat_operator(d: usize, tau: f64, k: usize) -> Result<DiagonalOperator> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(String::from("tau must be >= 0")));
    }
    let len = DiagonalOperator::box_len(d, k)?;
    let probe = DiagonalOperator::zero(d, k, 1.0)?;
    let mut lambdas = Vec::with_capacity(len);
    for flat in 0..len {
        let mode = probe.mode_of_box_index(flat);
        let l2_sq: f64 = mode.iter().map(|&c| (c as f64) * (c as f64)).sum();
        let value = math::exp(-4.0 * core::f64::consts::PI * core::f64::consts::PI * tau * l2_sq);
        lambdas.push(Complex64::new(value, 0.0));
    }
    DiagonalOperator::new(d, k, 1.0, lambdas)
}

/// `n` input/output field pairs at a common resolution.
#[derive(Debug, Clone)]
pub struct Dataset {
    spec: GridSpec,
    pairs: Vec<(GridField, GridField)>,
}

impl Dataset {
    pub fn new(spec: GridSpec, pairs: Vec<(GridField, GridField)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (v, w) in &pairs {
            check_same_spec(&spec, v.spec())?;
            check_same_spec(&spec, w.spec())?;
        }
        Ok(Self { spec, pairs })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(GridField, GridField)] {
        &self.pairs
    }
}

/// Seed streams used by [`generate_dataset`]'s fixed splitting rule.
const STREAM_INPUT: u64 = 0;
const STREAM_NOISE: u64 = 1;

/// Generate pair `i` of the dataset recipe: `v` from the configured random
/// field, `w = T⋆v (+ ε)`. Pair seeds derive from `(seed, i)` by a fixed
/// splitting rule, so any pair is reproducible in isolation.
pub fn generate_pair(
    t_star: &DiagonalOperator,
    grf: &GrfConfig,
    noise: bool,
    seed: u64,
    i: usize,
) -> Result<(GridField, GridField)> {
    let spec = grf.spec;
    let v = sample_grf(&grf.with_seed(derive(seed, STREAM_INPUT, i as u64)));
    let mut w = apply(t_star, &v)?;
    if noise {
        let eps = sample_noise(spec, derive(seed, STREAM_NOISE, i as u64));
        w = w.add(&eps)?;
    }
    Ok((v, w))
}

/// Generate `n` pairs `w_i = T⋆ v_i (+ ε_i)` with `v_i` drawn from the
/// configured random field and `ε_i` from the standard noise distribution;
/// deterministic given `seed` (`grf.seed` itself is not used here).
pub fn generate_dataset(
    t_star: &DiagonalOperator,
    grf: &GrfConfig,
    noise: bool,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let spec = grf.spec;
    if spec.n() <= 2 * t_star.k() {
        return Err(Error::ResolutionTooCoarse { n: spec.n(), k: t_star.k() });
    }
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        pairs.push(generate_pair(t_star, grf, noise, seed, i)?);
    }
    Dataset::new(spec, pairs)
}

/// Subsample a field from an `N₁` grid onto an `N₂` grid with `N₂ | N₁`;
/// every coarse point is a fine point, so values are copied exactly.
pub fn restrict_to_grid(u: &GridField, n2: usize) -> Result<GridField> {
    let fine = *u.spec();
    let n1 = fine.n();
    if n2 == 0 || n1 % n2 != 0 {
        return Err(Error::NonDivisorRestriction { fine: n1, coarse: n2 });
    }
    if n2 == n1 {
        return Ok(u.clone());
    }
    let coarse = GridSpec::new(fine.d(), n2)?;
    let ratio = n1 / n2;
    let mut values = Vec::with_capacity(coarse.len());
    let mut c_idx = vec![0usize; coarse.d()];
    let mut f_idx = vec![0usize; fine.d()];
    for flat in 0..coarse.len() {
        coarse.unravel(flat, &mut c_idx);
        for (fj, &cj) in f_idx.iter_mut().zip(c_idx.iter()) {
            *fj = cj * ratio;
        }
        values.push(u.values()[fine.ravel(&f_idx)]);
    }
    GridField::new(coarse, values)
}
