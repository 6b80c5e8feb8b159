//! The adversarial finite-support construction behind the excess-risk lower
//! bound, with exact (quadrature-free) risk evaluation.
//!
//! The distribution lives on the first coordinate axis of mode space
//! (`d = 1`). With `γ₀ = B/√(s+1)` and `γ_m = B/(√(s+1)·m^s)`, a sign
//! sequence `ξ_m = ξ_{−m} ∈ {±1}`, and `M = 2n`, the input marginal puts
//! 1/3 mass uniformly on `{γ_m ψ_m : m ∈ 𝒥_M^N}` (the first `M` positive
//! integers not divisible by `N`), 1/3 on the constant atom `γ₀ψ₀`, and 1/3
//! on the high-mode atom `γ_{K+j}ψ_{K+j}` with `j ∈ {1,2}` chosen so
//! `K+j ≢ 0 (mod N)`. Outputs are `w = ξ_m γ_m ψ_m`, except the constant
//! atom which maps to the aliased target `ξ_N γ_N ψ_N`.
//!
//! Atom budgets follow the construction's own Sobolev computation, which
//! weighs the mode-`m` pair by `Σ_{k=0..s} m^{2k}` (no 2π factors); under
//! that weight every atom meets the budget `B²`, with equality at `m = 1`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::estimator::{fit_closed_form, FitConfig};
use crate::grid::{GridField, GridSpec};
use crate::math;
use crate::operator::{Dataset, DiagonalOperator};
use crate::seed::derive;
use crate::spectrum::{dft_inverse, SpectrumField};

/// A function with finitely many Fourier modes on the `m₁` axis, stored as
/// `(mode, real coefficient)` pairs; this is the exact (infinite-resolution)
/// spectrum, not a grid object.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparseField {
    coeffs: Vec<(i64, f64)>,
}

impl SparseField {
    /// `scale·ψ_m`: the symmetrized real mode `(φ_m + φ_{−m})/√2`, or the
    /// constant `φ₀` for `m = 0`.
    pub fn psi(m: u64, scale: f64) -> Self {
        if m == 0 {
            Self { coeffs: alloc::vec![(0, scale)] }
        } else {
            let half = scale * math::sqrt(0.5);
            Self { coeffs: alloc::vec![(-(m as i64), half), (m as i64, half)] }
        }
    }

    pub fn coeffs(&self) -> &[(i64, f64)] {
        &self.coeffs
    }

    pub fn coeff(&self, mode: i64) -> f64 {
        self.coeffs
            .iter()
            .find(|(m, _)| *m == mode)
            .map(|(_, c)| *c)
            .unwrap_or(0.0)
    }

    /// Exact `‖·‖²_{L²}` by Parseval over the finite support.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|(_, c)| c * c).sum()
    }

    /// The construction's Sobolev budget `Σ_modes c²·Σ_{k=0..s} m^{2k}`.
    pub fn construction_budget_sq(&self, s: u32) -> f64 {
        self.coeffs
            .iter()
            .map(|(m, c)| {
                let m_sq = (*m as f64) * (*m as f64);
                let mut weight = 1.0;
                let mut pw = 1.0;
                for _ in 0..s {
                    pw *= m_sq;
                    weight += pw;
                }
                c * c * weight
            })
            .sum()
    }

    /// Values on the `N`-uniform grid: modes fold onto their residue class
    /// (`m` and `m + ℓN` are indistinguishable on the grid), then one exact
    /// inverse transform.
    pub fn to_grid(&self, spec: GridSpec) -> Result<GridField> {
        let mut s = SpectrumField::zero(spec);
        let n = spec.n() as i64;
        for (mode, c) in &self.coeffs {
            let idx = mode.rem_euclid(n) as usize;
            s.coeffs_mut()[idx] += Complex64::new(*c, 0.0);
        }
        dft_inverse(&s)
    }
}

/// One weighted support point `(v, w)`.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Atom {
    pub weight: f64,
    pub v: SparseField,
    pub w: SparseField,
}

/// The explicit weighted support of the adversarial distribution, enabling
/// exact risk computation.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteSupportDistribution {
    pub atoms: Vec<Atom>,
    pub s: u32,
    pub b: f64,
    pub grid_n: usize,
    pub k: usize,
    pub n_design: usize,
    /// The offset `j ∈ {1,2}` of the high-mode atom `K+j`.
    pub high_offset: usize,
    /// Signs by positive mode (`ξ_m = ξ_{−m}`).
    pub xi: BTreeMap<u64, f64>,
}

impl FiniteSupportDistribution {
    pub fn high_mode(&self) -> u64 {
        (self.k + self.high_offset) as u64
    }

    pub fn gamma(&self, m: u64) -> f64 {
        gamma_coeff(self.b, self.s, m)
    }
}

fn gamma_coeff(b: f64, s: u32, m: u64) -> f64 {
    if m == 0 {
        b / math::sqrt(s as f64 + 1.0)
    } else {
        b / (math::sqrt(s as f64 + 1.0) * math::powi(m as f64, s as i32))
    }
}

/// Build the adversarial distribution for design size `n` on the `N`-grid
/// with truncation `K`, smoothness `s`, and budget `B`; signs are drawn
/// from `xi_seed`. Requires `N > 1` and `N^s ≥ √2·B`.
pub fn build_adversarial_distribution(
    n: usize,
    grid_n: usize,
    k: usize,
    s: u32,
    b: f64,
    xi_seed: u64,
) -> Result<FiniteSupportDistribution> {
    if n == 0 {
        return Err(Error::InvalidParameter(alloc::format!("design size n must be >= 1")));
    }
    if grid_n <= 1 {
        return Err(Error::InvalidParameter(alloc::format!("grid size N must be > 1")));
    }
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("budget B must be > 0")));
    }
    if math::powi(grid_n as f64, s as i32) < math::sqrt(2.0) * b - 1e-12 {
        return Err(Error::InvalidParameter(alloc::format!(
            "construction requires N^s >= sqrt(2)·B (N={grid_n}, s={s}, B={b})"
        )));
    }

    let m_cap = 2 * n;
    let block: Vec<u64> = (1..=m_cap as u64).filter(|m| m % grid_n as u64 != 0).collect();
    // At most half of 1..=2n is divisible by N when N > 1.
    debug_assert!(block.len() >= n);

    let high_offset = if (k + 1) % grid_n != 0 { 1 } else { 2 };
    let high_mode = (k + high_offset) as u64;

    // Signs for every mode the construction touches, in ascending order.
    let mut sign_modes: Vec<u64> = block.clone();
    sign_modes.push(grid_n as u64);
    sign_modes.push(high_mode);
    sign_modes.sort_unstable();
    sign_modes.dedup();
    let mut rng = ChaCha12Rng::seed_from_u64(xi_seed);
    let mut xi = BTreeMap::new();
    for m in sign_modes {
        let sign = if rng.gen_range(0..2u8) == 0 { 1.0 } else { -1.0 };
        xi.insert(m, sign);
    }

    let mut atoms = Vec::with_capacity(block.len() + 2);
    let block_weight = (1.0 / 3.0) / block.len() as f64;
    for &m in &block {
        let gamma = gamma_coeff(b, s, m);
        atoms.push(Atom {
            weight: block_weight,
            v: SparseField::psi(m, gamma),
            w: SparseField::psi(m, xi[&m] * gamma),
        });
    }
    // Constant atom: the grid cannot tell its target ξ_N γ_N ψ_N from a
    // multiple of ψ₀ — the discretization mechanism.
    atoms.push(Atom {
        weight: 1.0 / 3.0,
        v: SparseField::psi(0, gamma_coeff(b, s, 0)),
        w: SparseField::psi(grid_n as u64, xi[&(grid_n as u64)] * gamma_coeff(b, s, grid_n as u64)),
    });
    // High-mode atom just beyond the truncation — the truncation mechanism.
    let gamma_high = gamma_coeff(b, s, high_mode);
    atoms.push(Atom {
        weight: 1.0 / 3.0,
        v: SparseField::psi(high_mode, gamma_high),
        w: SparseField::psi(high_mode, xi[&high_mode] * gamma_high),
    });

    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(alloc::format!(
            "atom weights sum to {total}, expected 1"
        )));
    }
    for atom in &atoms {
        for field in [&atom.v, &atom.w] {
            let budget = field.construction_budget_sq(s);
            if budget > b * b * (1.0 + 1e-9) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "atom exceeds Sobolev budget: {budget} > {}",
                    b * b
                )));
            }
        }
    }

    Ok(FiniteSupportDistribution {
        atoms,
        s,
        b,
        grid_n,
        k,
        n_design: n,
        high_offset,
        xi,
    })
}

/// Exact risk `Σ_atoms weight·‖Tv − w‖²_{L²}`, evaluated spectrally over
/// the finite supports (the operator is zero outside its box).
pub fn exact_risk(t: &DiagonalOperator, dist: &FiniteSupportDistribution) -> f64 {
    let mut total = 0.0;
    for atom in &dist.atoms {
        let mut modes: Vec<i64> = atom
            .v
            .coeffs()
            .iter()
            .chain(atom.w.coeffs().iter())
            .map(|(m, _)| *m)
            .collect();
        modes.sort_unstable();
        modes.dedup();
        let mut residual = 0.0;
        for mode in modes {
            let pred = t.lambda(&[mode]) * atom.v.coeff(mode);
            let target = Complex64::new(atom.w.coeff(mode), 0.0);
            residual += (pred - target).norm_sqr();
        }
        total += atom.weight * residual;
    }
    total
}

/// Exact risk of the sign comparator `T_ξ = Σ_{m≠0} ξ_m φ_m ⊗ φ_{−m}`,
/// which reproduces every sign atom and misses only the constant atom's
/// aliased target; an upper bound on the class infimum.
pub fn exact_risk_sign_comparator(dist: &FiniteSupportDistribution) -> f64 {
    let mut total = 0.0;
    for atom in &dist.atoms {
        let mut modes: Vec<i64> = atom
            .v
            .coeffs()
            .iter()
            .chain(atom.w.coeffs().iter())
            .map(|(m, _)| *m)
            .collect();
        modes.sort_unstable();
        modes.dedup();
        let mut residual = 0.0;
        for mode in modes {
            let pred = if mode == 0 {
                0.0
            } else {
                let sign = dist
                    .xi
                    .get(&mode.unsigned_abs())
                    .copied()
                    .expect("construction assigns signs to every touched mode");
                sign * atom.v.coeff(mode)
            };
            let diff = pred - atom.w.coeff(mode);
            residual += diff * diff;
        }
        total += atom.weight * residual;
    }
    total
}

/// Draw `n` training pairs from the distribution, realized on its `N`-grid.
pub fn sample_training_set(
    dist: &FiniteSupportDistribution,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let spec = GridSpec::new(1, dist.grid_n)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut u: f64 = rng.gen_range(0.0..1.0);
        let mut chosen = dist.atoms.len() - 1;
        for (i, atom) in dist.atoms.iter().enumerate() {
            if u < atom.weight {
                chosen = i;
                break;
            }
            u -= atom.weight;
        }
        let atom = &dist.atoms[chosen];
        pairs.push((atom.v.to_grid(spec)?, atom.w.to_grid(spec)?));
    }
    Dataset::new(spec, pairs)
}

/// The theorem's right-hand side:
/// `B²/(3(s+1)) · (1/(8n) + 1/N^{2s} + 2/(K+2)^{2s})`.
pub fn theorem_rhs(n: usize, grid_n: usize, k: usize, s: u32, b: f64) -> f64 {
    let s_f = s as f64;
    b * b / (3.0 * (s_f + 1.0))
        * (1.0 / (8.0 * n as f64)
            + math::powi(grid_n as f64, -2 * (s as i32))
            + 2.0 * math::powi((k + 2) as f64, -2 * (s as i32)))
}

/// Outcome of the ξ-averaged lower-bound verification.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LowerBoundReport {
    pub n: usize,
    pub grid_n: usize,
    pub k: usize,
    pub s: u32,
    pub b: f64,
    pub trials: usize,
    /// Mean exact excess risk over sign draws.
    pub mean_excess: f64,
    /// `B²/(3(s+1))·(1/(8n) + 1/N^{2s} + 2/(K+2)^{2s})`.
    pub theorem_rhs: f64,
    pub passed: bool,
    pub per_trial: Vec<f64>,
}

/// Over `trials` sign draws: build the distribution, sample `n` training
/// pairs on the `N`-grid, fit the truncation-`K` estimator (C = 1), and
/// average the exact excess risk against the sign comparator. The average
/// must dominate the theorem's right-hand side.
pub fn verify_lower_bound(
    n: usize,
    grid_n: usize,
    k: usize,
    s: u32,
    b: f64,
    trials: usize,
    master_seed: u64,
) -> Result<LowerBoundReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter(alloc::format!("trials must be >= 1")));
    }
    let mut per_trial = Vec::with_capacity(trials);
    for t in 0..trials {
        let dist = build_adversarial_distribution(
            n,
            grid_n,
            k,
            s,
            b,
            derive(master_seed, 0, t as u64),
        )?;
        let training = sample_training_set(&dist, n, derive(master_seed, 1, t as u64))?;
        let fitted = fit_closed_form(&training, &FitConfig::closed_form(k, 1.0))?;
        let excess = exact_risk(&fitted.operator, &dist) - exact_risk_sign_comparator(&dist);
        per_trial.push(excess);
    }
    let mean_excess = per_trial.iter().sum::<f64>() / trials as f64;
    let rhs = theorem_rhs(n, grid_n, k, s, b);
    Ok(LowerBoundReport {
        n,
        grid_n,
        k,
        s,
        b,
        trials,
        mean_excess,
        theorem_rhs: rhs,
        passed: mean_excess >= rhs,
    per_trial,
    })
}
