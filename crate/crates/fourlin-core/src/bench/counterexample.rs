//! The high-mode counterexample: a distribution supported only on modes
//! strictly above the estimator's truncation. The fitted operator never
//! sees its modes, predicts zero on the whole support, and pays excess risk
//! 1 against the all-ones comparator — independently of the sample size.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::estimator::{fit_closed_form, FitConfig};
use crate::grid::{index_of_mode, GridField, GridSpec, Mode};
use crate::math;
use crate::operator::Dataset;
use crate::spectrum::{dft_inverse, SpectrumField};

/// Exact excess risk of the truncated estimator on the high-mode support.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CounterexampleReport {
    /// Support modes `2^K < m < 2^{K+1}` (positive representatives).
    pub support_modes: Vec<u64>,
    /// Exact risk of the fitted estimator over the support.
    pub estimator_risk: f64,
    /// Risk of the all-ones comparator, which fixes every `ψ_m`; zero.
    pub comparator_risk: f64,
    /// `estimator_risk − comparator_risk`.
    pub excess_risk: f64,
    /// Modes the fit reported as never excited. The support carries no
    /// energy on the fitted box, though transform round-off can leave
    /// sub-1e-16 excitation that keeps this below the full box count.
    pub degenerate_modes: usize,
    pub n_samples: usize,
}

/// `ψ_m = (φ_m + φ_{−m})/√2` realized on a one-dimensional grid.
fn psi_on_grid(spec: GridSpec, m: u64) -> GridField {
    let mut s = SpectrumField::zero(spec);
    let half = Complex64::new(math::sqrt(0.5), 0.0);
    let ip = index_of_mode(&Mode::new(alloc::vec![m as i64]), &spec).expect("below Nyquist");
    let im = index_of_mode(&Mode::new(alloc::vec![-(m as i64)]), &spec).expect("below Nyquist");
    s.coeffs_mut()[spec.ravel(&ip)] = half;
    s.coeffs_mut()[spec.ravel(&im)] = half;
    dft_inverse(&s).expect("conjugate-symmetric by construction")
}

/// Sample `n` pairs from `Uniform({(ψ_m, ψ_m) : 2^K < m < 2^{K+1}})`, fit
/// the truncation-`K` estimator, and evaluate its exact excess risk over the
/// support (a finite sum in the function space, no quadrature).
pub fn high_mode_counterexample(k: usize, n_samples: usize, seed: u64) -> Result<CounterexampleReport> {
    if k == 0 || k > 3 {
        return Err(Error::InvalidParameter(alloc::format!(
            "counterexample needs 1 <= K <= 3 so the support fits a desk-scale grid, got {k}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::EmptyDataset);
    }
    let lo = 1u64 << k;
    let hi = 1u64 << (k + 1);
    let support_modes: Vec<u64> = (lo + 1..hi).collect();
    // Nyquist of the sampling grid sits at 2^{K+2}, above every support mode.
    let grid_n = 1usize << (k + 3);
    let spec = GridSpec::new(1, grid_n)?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let m = support_modes[rng.gen_range(0..support_modes.len())];
        let psi = psi_on_grid(spec, m);
        pairs.push((psi.clone(), psi));
    }
    let data = Dataset::new(spec, pairs)?;
    let fitted = fit_closed_form(&data, &FitConfig::closed_form(k, 1.0))?;

    // Exact risk: the true spectrum of ψ_m is ±m with weight 1/√2, so
    // ‖T̂ψ_m − ψ_m‖² = |λ̂_m − 1|²/2 + |λ̂_{−m} − 1|²/2 in L²(T¹).
    let weight = 1.0 / support_modes.len() as f64;
    let mut estimator_risk = 0.0;
    for &m in &support_modes {
        let lam_p = fitted.operator.lambda(&[m as i64]);
        let lam_m = fitted.operator.lambda(&[-(m as i64)]);
        estimator_risk += weight
            * 0.5
            * ((lam_p - Complex64::new(1.0, 0.0)).norm_sqr()
                + (lam_m - Complex64::new(1.0, 0.0)).norm_sqr());
    }
    // T⋆ = Σ_m φ_m ⊗ φ_{−m} satisfies T⋆ψ_m = ψ_m on every support atom.
    let comparator_risk = 0.0;

    Ok(CounterexampleReport {
        support_modes,
        estimator_risk,
        comparator_risk,
        excess_risk: estimator_risk - comparator_risk,
        degenerate_modes: fitted.diagnostics.modes_degenerate,
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excess_risk_is_exactly_one() {
        for n in [1usize, 10] {
            let report = high_mode_counterexample(2, n, 7).unwrap();
            assert!(
                report.excess_risk >= 1.0 - 1e-9,
                "n={n}: excess {}",
                report.excess_risk
            );
            assert!(report.excess_risk <= 1.0 + 1e-9);
            assert_eq!(report.comparator_risk, 0.0);
        }
    }

    #[test]
    fn support_sits_strictly_between_powers() {
        let report = high_mode_counterexample(2, 3, 1).unwrap();
        assert_eq!(report.support_modes, alloc::vec![5, 6, 7]);
        let r3 = high_mode_counterexample(3, 3, 1).unwrap();
        assert_eq!(r3.support_modes, alloc::vec![9, 10, 11, 12, 13, 14, 15]);
    }

    #[test]
    fn independent_of_sample_size_and_seed() {
        let a = high_mode_counterexample(2, 1, 0).unwrap();
        let b = high_mode_counterexample(2, 64, 123).unwrap();
        assert!((a.excess_risk - b.excess_risk).abs() < 1e-12);
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(high_mode_counterexample(0, 1, 0).is_err());
        assert!(high_mode_counterexample(4, 1, 0).is_err());
        assert!(high_mode_counterexample(2, 0, 0).is_err());
    }
}
