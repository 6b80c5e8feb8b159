//! The DFT-based constrained least-squares estimator.
//!
//! Given pairs `(v_i, w_i)` on an `N^d` grid, the estimator minimizes
//! `(1/n)·Σ_i Σ_{|m|∞≤K} |λ_m·DFT(v_i)(−m) − DFT(w_i)(−m)|²` subject to
//! `sup_m |λ_m| ≤ C`. The objective separates over modes; per mode it is a
//! one-dimensional complex quadratic whose constrained minimizer is the
//! unconstrained ratio radially projected onto the disk of radius `C`. The
//! closed form is therefore exact and doubles as the convergence oracle for
//! the projected-SGD route.
//!
//! Modes with a component on the even-grid Nyquist column are excluded from
//! fitting (they are sign-ambiguous on the grid), so a requested `K = N/2`
//! degrades to the effective truncation `N/2 − 1`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::grid::{flat_index_of_mode, GridField, Mode};
use crate::math;
use crate::operator::{apply, Dataset, DiagonalOperator};
use crate::spectrum::{dft_forward, grid_l2_norm_sq};

/// Optimization route for the fit.
#[derive(Debug, Clone, PartialEq)]
pub enum FitMethod {
    /// Exact per-mode minimizer with radial projection.
    ClosedForm,
    /// Mini-batch projected gradient descent on `(Re λ_m, Im λ_m)`.
    ProjectedSgd(SgdConfig),
}

/// Hyperparameters of the projected-SGD route.
///
/// Steps are preconditioned per mode by the mean excitation
/// `A_m = (1/n)Σ|a_i|²`, so `step` is a dimensionless contraction factor in
/// `(0, 2)`; it decays over the run and the tail-averaged iterate is kept.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SgdConfig {
    pub step: f64,
    pub batch: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Early-stop threshold: relative gap to the closed-form objective.
    pub tol_rel: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self { step: 0.5, batch: 32, epochs: 200, seed: 0, tol_rel: 1e-6 }
    }
}

/// Truncation, constraint radius, and method of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub k: usize,
    pub c: f64,
    pub method: FitMethod,
}

impl FitConfig {
    pub fn closed_form(k: usize, c: f64) -> Self {
        Self { k, c, method: FitMethod::ClosedForm }
    }

    pub fn projected_sgd(k: usize, c: f64, sgd: SgdConfig) -> Self {
        Self { k, c, method: FitMethod::ProjectedSgd(sgd) }
    }
}

/// Counters and traces gathered during a fit.
#[derive(Debug, Clone, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitDiagnostics {
    /// Modes whose unconstrained minimizer was projected onto the disk.
    pub modes_clipped: usize,
    /// Modes never excited by the data (`Σ|a_i|² = 0`), set to zero.
    pub modes_degenerate: usize,
    /// SGD only: epochs actually run.
    pub epochs_run: usize,
    /// SGD only: whether the early-stop tolerance was reached.
    pub converged: bool,
    /// SGD only: full objective after each epoch.
    pub epoch_loss: Vec<f64>,
}

/// A fitted operator with its per-mode residuals and diagnostics.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub operator: DiagonalOperator,
    /// `(1/n)·Σ_i |λ̂_m a_i − b_i|²`, aligned with the operator's storage.
    residuals: Vec<f64>,
    /// `(1/n)·Σ_i |b_i|²` per mode: the residual of the zero predictor.
    target_energy: Vec<f64>,
    /// The empirical DFT least-squares loss of the returned operator.
    pub objective: f64,
    pub diagnostics: FitDiagnostics,
}

impl FitResult {
    /// Residuals in the operator's lexicographic mode order.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Residual of one mode, `None` outside the fitted box.
    pub fn per_mode_residual(&self, mode: &[i64]) -> Option<f64> {
        self.operator.box_index(mode).map(|i| self.residuals[i])
    }

    /// Per-mode mean target energy `(1/n)Σ|b_i|²` in box order; the fitted
    /// residual never exceeds it (the zero predictor is always feasible).
    pub fn target_energy(&self) -> &[f64] {
        &self.target_energy
    }
}

/// Per-mode sufficient statistics: `Σ|a|²`, `Σ b·conj(a)`, `Σ|b|²` over the
/// sample, in box order. The whole objective is a function of these.
struct ModeSums {
    template: DiagonalOperator,
    s_aa: Vec<f64>,
    s_ba: Vec<Complex64>,
    s_bb: Vec<f64>,
    n: usize,
}

impl ModeSums {
    /// Objective value of a parameter vector, `(1/n)Σ_i Σ_m |λa−b|²`.
    fn objective(&self, lambdas: &[Complex64]) -> f64 {
        let mut total = 0.0;
        for (bi, lam) in lambdas.iter().enumerate() {
            total += lam.norm_sqr() * self.s_aa[bi] - 2.0 * (lam.conj() * self.s_ba[bi]).re
                + self.s_bb[bi];
        }
        total / self.n as f64
    }

    fn per_mode_residuals(&self, lambdas: &[Complex64]) -> Vec<f64> {
        lambdas
            .iter()
            .enumerate()
            .map(|(bi, lam)| {
                (lam.norm_sqr() * self.s_aa[bi] - 2.0 * (lam.conj() * self.s_ba[bi]).re
                    + self.s_bb[bi])
                    / self.n as f64
            })
            .collect()
    }

    /// The exact constrained minimizer: unconstrained ratio, radially
    /// projected (exact for a disk constraint on a radially symmetric
    /// quadratic); never-excited modes get the minimum-norm choice zero.
    fn closed_form_lambdas(&self, c: f64) -> (Vec<Complex64>, usize, usize) {
        let mut lambdas = Vec::with_capacity(self.s_aa.len());
        let mut clipped = 0;
        let mut degenerate = 0;
        for bi in 0..self.s_aa.len() {
            if self.s_aa[bi] == 0.0 {
                degenerate += 1;
                lambdas.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let mut lam = self.s_ba[bi] / self.s_aa[bi];
            let modulus = lam.norm();
            if modulus > c {
                lam *= c / modulus;
                clipped += 1;
            }
            lambdas.push(lam);
        }
        (lambdas, clipped, degenerate)
    }
}

/// Validate truncation/constraint against a grid resolution and return the
/// effective truncation (requested `K`, capped at the Nyquist-free
/// representable range).
fn effective_truncation_for(spec: &crate::grid::GridSpec, cfg: &FitConfig) -> Result<usize> {
    if !(cfg.c > 0.0) {
        return Err(Error::InvalidParameter(String::from("constraint radius C must be > 0")));
    }
    if 2 * cfg.k > spec.n() {
        return Err(Error::TruncationTooLarge { k: cfg.k, n: spec.n() });
    }
    Ok(cfg.k.min(spec.max_safe_mode()))
}

fn effective_truncation(data: &Dataset, cfg: &FitConfig) -> Result<usize> {
    effective_truncation_for(data.spec(), cfg)
}

/// Streaming closed-form fit: pairs are folded into per-mode sufficient
/// statistics one at a time, so a fit never holds more than one pair's
/// spectra in memory. `fit_closed_form` is `new` + `add_pair`* + `finish`.
pub struct FitAccumulator {
    spec: crate::grid::GridSpec,
    c: f64,
    sums: ModeSums,
    flat_of_box: Vec<usize>,
}

impl FitAccumulator {
    pub fn new(spec: crate::grid::GridSpec, cfg: &FitConfig) -> Result<Self> {
        let k_eff = effective_truncation_for(&spec, cfg)?;
        let template = DiagonalOperator::zero(spec.d(), k_eff, cfg.c)?;
        let box_len = template.lambdas().len();
        let flat_of_box: Vec<usize> = (0..box_len)
            .map(|bi| {
                let mode = Mode::new(template.mode_of_box_index(bi));
                flat_index_of_mode(&mode, &spec).expect("box modes representable for 2K <= N")
            })
            .collect();
        let sums = ModeSums {
            template,
            s_aa: vec![0.0; box_len],
            s_ba: vec![Complex64::new(0.0, 0.0); box_len],
            s_bb: vec![0.0; box_len],
            n: 0,
        };
        Ok(Self { spec, c: cfg.c, sums, flat_of_box })
    }

    pub fn add_pair(&mut self, v: &GridField, w: &GridField) -> Result<()> {
        crate::grid::check_same_spec(&self.spec, v.spec())?;
        crate::grid::check_same_spec(&self.spec, w.spec())?;
        let a_hat = dft_forward(v)?;
        let b_hat = dft_forward(w)?;
        for (bi, &flat) in self.flat_of_box.iter().enumerate() {
            let a = a_hat.coeffs()[flat];
            let b = b_hat.coeffs()[flat];
            self.sums.s_aa[bi] += a.norm_sqr();
            self.sums.s_ba[bi] += b * a.conj();
            self.sums.s_bb[bi] += b.norm_sqr();
        }
        self.sums.n += 1;
        Ok(())
    }

    /// Pairs accumulated so far.
    pub fn n(&self) -> usize {
        self.sums.n
    }

    /// Solve the closed form on the accumulated statistics.
    pub fn finish(&self) -> Result<FitResult> {
        if self.sums.n == 0 {
            return Err(Error::EmptyDataset);
        }
        let (lambdas, clipped, degenerate) = self.sums.closed_form_lambdas(self.c);
        let diagnostics = FitDiagnostics {
            modes_clipped: clipped,
            modes_degenerate: degenerate,
            ..FitDiagnostics::default()
        };
        result_from_lambdas(&self.sums, lambdas, self.c, diagnostics)
    }
}

/// Accumulate the per-mode sufficient statistics in one streaming pass.
fn accumulate(data: &Dataset, k_eff: usize, c: f64) -> Result<ModeSums> {
    let mut acc = FitAccumulator::new(*data.spec(), &FitConfig::closed_form(k_eff, c))?;
    for (v, w) in data.pairs() {
        acc.add_pair(v, w)?;
    }
    Ok(acc.sums)
}

fn result_from_lambdas(
    sums: &ModeSums,
    lambdas: Vec<Complex64>,
    c: f64,
    diagnostics: FitDiagnostics,
) -> Result<FitResult> {
    let objective = sums.objective(&lambdas);
    let residuals = sums.per_mode_residuals(&lambdas);
    let target_energy = sums.s_bb.iter().map(|s| s / sums.n as f64).collect();
    let operator =
        DiagonalOperator::new(sums.template.d(), sums.template.k(), c, lambdas)?;
    Ok(FitResult { operator, residuals, target_energy, objective, diagnostics })
}

/// Fit by the configured method.
pub fn fit(data: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
    match &cfg.method {
        FitMethod::ClosedForm => fit_closed_form(data, cfg),
        FitMethod::ProjectedSgd(_) => fit_projected_sgd(data, cfg),
    }
}

/// Exact per-mode constrained least squares.
pub fn fit_closed_form(data: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
    let k_eff = effective_truncation(data, cfg)?;
    let sums = accumulate(data, k_eff, cfg.c)?;
    let (lambdas, clipped, degenerate) = sums.closed_form_lambdas(cfg.c);
    let diagnostics = FitDiagnostics {
        modes_clipped: clipped,
        modes_degenerate: degenerate,
        ..FitDiagnostics::default()
    };
    result_from_lambdas(&sums, lambdas, cfg.c, diagnostics)
}

/// Mini-batch projected gradient descent on the same objective.
///
/// Per mode the update is `λ ← Π_C(λ − (s_t/A_m)(λ·Ā_batch − S̄_batch))`
/// with `Π_C` the disk projection applied after every step. The step factor
/// decays over the run; the tail-averaged iterate is kept when it scores
/// better. Stops early once the objective is within `tol_rel` of the
/// closed-form objective.
pub fn fit_projected_sgd(data: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
    let sgd = match &cfg.method {
        FitMethod::ProjectedSgd(sgd) => sgd.clone(),
        FitMethod::ClosedForm => {
            return Err(Error::InvalidParameter(String::from(
                "fit_projected_sgd requires a ProjectedSgd method configuration",
            )))
        }
    };
    if !(sgd.step > 0.0 && sgd.step < 2.0) {
        return Err(Error::InvalidParameter(String::from("SGD step factor must lie in (0, 2)")));
    }
    if sgd.batch == 0 || sgd.epochs == 0 {
        return Err(Error::InvalidParameter(String::from("SGD batch and epochs must be >= 1")));
    }

    let k_eff = effective_truncation(data, cfg)?;
    let sums = accumulate(data, k_eff, cfg.c)?;
    let box_len = sums.s_aa.len();
    let n = data.n();
    let batch = sgd.batch.min(n);

    // Per-pair per-mode products, gathered once.
    let spec = data.spec();
    let flat_of_box: Vec<usize> = (0..box_len)
        .map(|bi| {
            let mode = Mode::new(sums.template.mode_of_box_index(bi));
            flat_index_of_mode(&mode, spec).expect("box modes representable")
        })
        .collect();
    let mut aa = vec![0.0f64; n * box_len];
    let mut ba = vec![Complex64::new(0.0, 0.0); n * box_len];
    for (i, (v, w)) in data.pairs().iter().enumerate() {
        let a_hat = dft_forward(v)?;
        let b_hat = dft_forward(w)?;
        for (bi, &flat) in flat_of_box.iter().enumerate() {
            let a = a_hat.coeffs()[flat];
            let b = b_hat.coeffs()[flat];
            aa[i * box_len + bi] = a.norm_sqr();
            ba[i * box_len + bi] = b * a.conj();
        }
    }

    // Mean excitation per mode; the per-mode preconditioner.
    let precond: Vec<f64> = sums.s_aa.iter().map(|s| s / n as f64).collect();
    let (cf_lambdas, _, degenerate) = sums.closed_form_lambdas(cfg.c);
    let objective_floor = sums.objective(&cf_lambdas);

    let mut rng = ChaCha12Rng::seed_from_u64(sgd.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut lambdas = vec![Complex64::new(0.0, 0.0); box_len];
    let mut avg = vec![Complex64::new(0.0, 0.0); box_len];
    let mut avg_count = 0usize;
    let mut batch_aa = vec![0.0f64; box_len];
    let mut batch_ba = vec![Complex64::new(0.0, 0.0); box_len];

    let steps_per_epoch = n.div_ceil(batch);
    let total_steps = steps_per_epoch * sgd.epochs;
    let tail_start = total_steps / 2;
    let mut epoch_loss = Vec::with_capacity(sgd.epochs);
    let initial_objective = sums.objective(&lambdas);
    let mut converged = false;
    let mut epochs_run = 0usize;
    let mut step_index = 0usize;

    'epochs: for _epoch in 0..sgd.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            // Step factor decays toward a tenth of its initial value.
            let s_t =
                sgd.step / (1.0 + 9.0 * step_index as f64 / total_steps.max(1) as f64);
            let bsz = chunk.len() as f64;
            batch_aa.iter_mut().for_each(|x| *x = 0.0);
            batch_ba.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            for &i in chunk {
                let row = i * box_len;
                for bi in 0..box_len {
                    batch_aa[bi] += aa[row + bi];
                    batch_ba[bi] += ba[row + bi];
                }
            }
            for bi in 0..box_len {
                let a_mean = precond[bi];
                if a_mean == 0.0 {
                    continue; // never-excited mode stays at zero
                }
                let grad = lambdas[bi] * (batch_aa[bi] / bsz) - batch_ba[bi] / bsz;
                let mut lam = lambdas[bi] - grad * (s_t / a_mean);
                let modulus = lam.norm();
                if modulus > cfg.c {
                    lam *= cfg.c / modulus;
                }
                debug_assert!(lam.norm() <= cfg.c * (1.0 + 1e-12));
                lambdas[bi] = lam;
                if step_index >= tail_start {
                    avg[bi] += lam;
                }
            }
            if step_index >= tail_start {
                avg_count += 1;
            }
            step_index += 1;
        }
        epochs_run += 1;
        let objective = sums.objective(&lambdas);
        epoch_loss.push(objective);
        if !objective.is_finite() || objective > 10.0 * initial_objective.max(1e-300) {
            return Err(Error::NonConvergence { objective, epochs_run });
        }
        if objective <= objective_floor * (1.0 + sgd.tol_rel) {
            converged = true;
            break 'epochs;
        }
    }

    // Keep the better of the final iterate and the tail average.
    if avg_count > 0 {
        let mut averaged: Vec<Complex64> =
            avg.iter().map(|z| z / avg_count as f64).collect();
        for lam in averaged.iter_mut() {
            let modulus = lam.norm();
            if modulus > cfg.c {
                *lam *= cfg.c / modulus;
            }
        }
        if sums.objective(&averaged) < sums.objective(&lambdas) {
            lambdas = averaged;
        }
    }
    let final_objective = sums.objective(&lambdas);
    if !converged && final_objective <= objective_floor * (1.0 + sgd.tol_rel) {
        converged = true;
    }

    let clipped = lambdas
        .iter()
        .filter(|l| l.norm() >= cfg.c * (1.0 - 1e-12) && l.norm() > 0.0)
        .count();
    let diagnostics = FitDiagnostics {
        modes_clipped: clipped,
        modes_degenerate: degenerate,
        epochs_run,
        converged,
        epoch_loss,
    };
    result_from_lambdas(&sums, lambdas, cfg.c, diagnostics)
}

/// Evaluate a fitted operator on an input at any resolution `N' > 2K`;
/// modes above the truncation are zero, so the operator transfers across
/// resolutions without retraining.
pub fn predict(t_hat: &DiagonalOperator, v: &GridField) -> Result<GridField> {
    apply(t_hat, v)
}

/// Denominator convention of the relative test error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Denominator {
    /// `‖w‖_{L²}` — the formula exactly as reported.
    Norm,
    /// `‖w‖²_{L²}` — the fully dimensionless variant.
    NormSquared,
}

/// Relative mean-squared test error
/// `(1/n)·Σ_i ‖w_i − T̂v_i‖²_{L²} / ‖w_i‖_{L²}` with grid L² norms.
pub fn relative_mse(t_hat: &DiagonalOperator, test: &Dataset) -> Result<f64> {
    relative_mse_with(t_hat, test, Denominator::Norm)
}

/// [`relative_mse`] with an explicit denominator convention.
pub fn relative_mse_with(
    t_hat: &DiagonalOperator,
    test: &Dataset,
    denominator: Denominator,
) -> Result<f64> {
    let mut acc = 0.0;
    for (index, (v, w)) in test.pairs().iter().enumerate() {
        let pred = predict(t_hat, v)?;
        let err_sq = grid_l2_norm_sq(&w.sub(&pred)?);
        let norm_sq = grid_l2_norm_sq(w);
        if norm_sq == 0.0 {
            return Err(Error::ZeroNormTarget { index });
        }
        let den = match denominator {
            Denominator::Norm => math::sqrt(norm_sq),
            Denominator::NormSquared => norm_sq,
        };
        acc += err_sq / den;
    }
    Ok(acc / test.n() as f64)
}

/// Empirical excess risk of `t_hat` against a reference operator standing in
/// for the class infimum:
/// `(1/n)·Σ_i [‖T̂v_i − w_i‖² − ‖T_ref v_i − w_i‖²]`.
pub fn empirical_excess_risk(
    t_hat: &DiagonalOperator,
    t_ref: &DiagonalOperator,
    test: &Dataset,
) -> Result<f64> {
    let mut acc = 0.0;
    for (v, w) in test.pairs() {
        let est = apply(t_hat, v)?;
        let refp = apply(t_ref, v)?;
        acc += grid_l2_norm_sq(&w.sub(&est)?) - grid_l2_norm_sq(&w.sub(&refp)?);
    }
    Ok(acc / test.n() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grf::{sample_grf, GrfConfig};
    use crate::grid::GridSpec;
    use crate::operator::{generate_dataset, restrict_to_grid, synthesize_random_operator};
    use crate::seed::derive;
    use core::f64::consts::PI;
    use rand::Rng;
    use rand_chacha::ChaCha12Rng;

    fn grf(d: usize, n: usize) -> GrfConfig {
        GrfConfig::new(GridSpec::new(d, n).unwrap(), 2.0, 10.0, 0).unwrap()
    }

    fn recipe_dataset(d: usize, n_grid: usize, k_star: usize, n: usize, seed: u64) -> (DiagonalOperator, Dataset) {
        let t = synthesize_random_operator(d, k_star, 2.0, derive(seed, 10, 0), true).unwrap();
        let data = generate_dataset(&t, &grf(d, n_grid), true, n, derive(seed, 11, 0)).unwrap();
        (t, data)
    }

    #[test]
    fn noiseless_data_recovers_the_operator() {
        let t_star = synthesize_random_operator(2, 3, 2.0, 3, true).unwrap();
        let data = generate_dataset(&t_star, &grf(2, 16), false, 4, 5).unwrap();
        let result = fit_closed_form(&data, &FitConfig::closed_form(3, 2.0)).unwrap();
        let worst = (0..result.operator.lambdas().len())
            .map(|bi| {
                let mode = result.operator.mode_of_box_index(bi);
                (result.operator.lambdas()[bi] - t_star.lambda(&mode)).norm()
            })
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "worst deviation {worst:e}");
        assert_eq!(result.diagnostics.modes_degenerate, 0);
    }

    #[test]
    fn projection_clips_an_overscaled_mode() {
        // One pair v = cos(2π·2x) on an 8-grid (the integer sample pattern
        // [1,0,−1,0,…], whose transform cancels exactly), w = 2v with C = 1:
        // the unconstrained value 2 is clipped to 1 at m = ±2, and every
        // other mode is exactly unexcited, hence degenerate.
        let spec = GridSpec::new(1, 8).unwrap();
        let pattern = alloc::vec![1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0];
        let v = GridField::new(spec, pattern.clone()).unwrap();
        let w = v.scale(2.0).unwrap();
        let data = Dataset::new(spec, alloc::vec![(v, w)]).unwrap();
        let result = fit_closed_form(&data, &FitConfig::closed_form(2, 1.0)).unwrap();
        assert!((result.operator.lambda(&[2]) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((result.operator.lambda(&[-2]) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(result.diagnostics.modes_clipped, 2);
        assert_eq!(result.diagnostics.modes_degenerate, 3); // modes 0, ±1
        assert!((result.operator.lambda(&[0])).norm() == 0.0);

        // A cosine sampled through libm leaves rounding-level excitation on
        // the other modes; the substance (clip to the disk) is unchanged.
        let vc = GridField::from_fn(spec, |x| (2.0 * PI * x[0]).cos()).unwrap();
        let wc = vc.scale(2.0).unwrap();
        let data = Dataset::new(spec, alloc::vec![(vc, wc)]).unwrap();
        let result = fit_closed_form(&data, &FitConfig::closed_form(2, 1.0)).unwrap();
        assert!((result.operator.lambda(&[1]) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((result.operator.lambda(&[-1]) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unexcited_inputs_are_degenerate() {
        // v ≡ 0 never excites any mode: all parameters stay at the
        // minimum-norm choice zero and the degenerate counter covers the box.
        let spec = GridSpec::new(1, 8).unwrap();
        let v = GridField::constant(spec, 0.0).unwrap();
        let w = GridField::from_fn(spec, |x| (2.0 * PI * x[0]).cos()).unwrap();
        let data = Dataset::new(spec, alloc::vec![(v, w)]).unwrap();
        let result = fit_closed_form(&data, &FitConfig::closed_form(2, 1.0)).unwrap();
        assert!(result.operator.lambdas().iter().all(|l| l.norm() == 0.0));
        assert_eq!(result.diagnostics.modes_degenerate, 5);
        assert_eq!(result.diagnostics.modes_clipped, 0);
    }

    #[test]
    fn objective_is_recomputable() {
        let (_, data) = recipe_dataset(2, 16, 3, 8, 1);
        let cfg = FitConfig::closed_form(3, 2.0);
        let result = fit_closed_form(&data, &cfg).unwrap();
        // Second, independent pass over the data.
        let mut total = 0.0;
        for (v, w) in data.pairs() {
            let a_hat = dft_forward(v).unwrap();
            let b_hat = dft_forward(w).unwrap();
            for bi in 0..result.operator.lambdas().len() {
                let mode = Mode::new(result.operator.mode_of_box_index(bi));
                let a = a_hat.coeff_at(&mode).unwrap();
                let b = b_hat.coeff_at(&mode).unwrap();
                total += (result.operator.lambdas()[bi] * a - b).norm_sqr();
            }
        }
        total /= data.n() as f64;
        assert!((total - result.objective).abs() <= 1e-10 * total.max(1.0));
        let sum_residuals: f64 = result.residuals().iter().sum();
        assert!((sum_residuals - result.objective).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn fits_are_mode_local() {
        // Fitting with K and K' < K gives identical parameters on shared
        // modes (closed form is mode-separable).
        let (_, data) = recipe_dataset(2, 16, 3, 6, 2);
        let big = fit_closed_form(&data, &FitConfig::closed_form(3, 2.0)).unwrap();
        let small = fit_closed_form(&data, &FitConfig::closed_form(2, 2.0)).unwrap();
        for bi in 0..small.operator.lambdas().len() {
            let mode = small.operator.mode_of_box_index(bi);
            assert_eq!(small.operator.lambdas()[bi], big.operator.lambda(&mode));
        }
    }

    #[test]
    fn constrained_minimum_beats_probe_points() {
        let (_, data) = recipe_dataset(2, 16, 2, 5, 3);
        let c = 0.5; // force some clipping
        let result = fit_closed_form(&data, &FitConfig::closed_form(2, c)).unwrap();
        // Rebuild per-mode sums independently, then probe the disk.
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for bi in 0..result.operator.lambdas().len() {
            let mode = Mode::new(result.operator.mode_of_box_index(bi));
            let mut s_aa = 0.0;
            let mut s_ba = Complex64::new(0.0, 0.0);
            let mut s_bb = 0.0;
            for (v, w) in data.pairs() {
                let a = dft_forward(v).unwrap().coeff_at(&mode).unwrap();
                let b = dft_forward(w).unwrap().coeff_at(&mode).unwrap();
                s_aa += a.norm_sqr();
                s_ba += b * a.conj();
                s_bb += b.norm_sqr();
            }
            let loss = |lam: Complex64| {
                lam.norm_sqr() * s_aa - 2.0 * (lam.conj() * s_ba).re + s_bb
            };
            let at_hat = loss(result.operator.lambdas()[bi]);
            for probe in 0..21 {
                let r = if probe % 3 == 0 { c } else { rng.gen_range(0.0..c) };
                let phase = rng.gen_range(0.0..(2.0 * PI));
                let candidate = Complex64::from_polar(r, phase);
                assert!(
                    at_hat <= loss(candidate) + 1e-10,
                    "mode {mode} probe {probe}"
                );
            }
        }
    }

    #[test]
    fn constraint_and_symmetry_hold_for_both_methods() {
        let (_, data) = recipe_dataset(2, 16, 3, 12, 4);
        let c = 1.0;
        let cf = fit_closed_form(&data, &FitConfig::closed_form(3, c)).unwrap();
        let sgd_cfg = SgdConfig { epochs: 40, seed: 7, ..SgdConfig::default() };
        let sgd = fit_projected_sgd(&data, &FitConfig::projected_sgd(3, c, sgd_cfg)).unwrap();
        for result in [&cf, &sgd] {
            let max_mod =
                result.operator.lambdas().iter().map(|l| l.norm()).fold(0.0f64, f64::max);
            assert!(max_mod <= c + 1e-12);
        }
        // Real data ⇒ conjugate-symmetric parameters.
        assert!(cf.operator.conjugate_symmetry_deviation() <= 1e-10);
        assert!(cf.operator.real_output());
    }

    #[test]
    fn nyquist_request_degrades_to_effective_truncation() {
        let (_, data) = recipe_dataset(2, 16, 3, 4, 5);
        let result = fit_closed_form(&data, &FitConfig::closed_form(8, 2.0)).unwrap();
        assert_eq!(result.operator.k(), 7); // N/2 − 1
        assert!(fit_closed_form(&data, &FitConfig::closed_form(9, 2.0)).is_err());
    }

    #[test]
    fn sgd_matches_closed_form_objective() {
        let (_, data) = recipe_dataset(2, 16, 3, 20, 6);
        let cf = fit_closed_form(&data, &FitConfig::closed_form(3, 2.0)).unwrap();
        let sgd_cfg = SgdConfig { epochs: 3000, seed: 11, ..SgdConfig::default() };
        let sgd =
            fit_projected_sgd(&data, &FitConfig::projected_sgd(3, 2.0, sgd_cfg)).unwrap();
        let rel = (sgd.objective - cf.objective).abs() / cf.objective;
        assert!(rel <= 1e-6, "relative objective gap {rel:e}");
        assert!(sgd.diagnostics.converged);
        assert!(sgd.diagnostics.epochs_run <= 3000);
        assert!(!sgd.diagnostics.epoch_loss.is_empty());
    }

    #[test]
    fn sgd_on_zero_targets_stays_zero() {
        let spec = GridSpec::new(1, 16).unwrap();
        let pairs: Vec<(GridField, GridField)> = (0..4)
            .map(|i| {
                let v = sample_grf(&GrfConfig::new(spec, 2.0, 1.0, i).unwrap());
                let w = GridField::constant(spec, 0.0).unwrap();
                (v, w)
            })
            .collect();
        let data = Dataset::new(spec, pairs).unwrap();
        let sgd_cfg = SgdConfig { epochs: 5, ..SgdConfig::default() };
        let result =
            fit_projected_sgd(&data, &FitConfig::projected_sgd(3, 1.0, sgd_cfg)).unwrap();
        assert!(result.operator.lambdas().iter().all(|l| l.norm() == 0.0));
    }

    #[test]
    fn sgd_diverges_with_unstable_step() {
        let (_, data) = recipe_dataset(2, 16, 3, 8, 7);
        let sgd_cfg = SgdConfig { step: 1.99, batch: 2, epochs: 400, seed: 1, tol_rel: 0.0 };
        match fit_projected_sgd(&data, &FitConfig::projected_sgd(3, 2.0, sgd_cfg)) {
            // An almost-unstable step with tiny batches either trips the
            // divergence detector or survives thanks to the projection;
            // what is not allowed is a silent bogus objective.
            Err(Error::NonConvergence { .. }) => {}
            Ok(result) => assert!(result.objective.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
        // Step factor outside (0,2) is rejected up front.
        let bad = SgdConfig { step: 2.5, ..SgdConfig::default() };
        assert!(matches!(
            fit_projected_sgd(&data, &FitConfig::projected_sgd(3, 2.0, bad)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn predict_matches_apply_and_commutes_with_restriction() {
        let (t_star, data) = recipe_dataset(2, 16, 3, 6, 8);
        let result = fit_closed_form(&data, &FitConfig::closed_form(3, 2.0)).unwrap();
        let v = sample_grf(&grf(2, 16).with_seed(123));
        let direct = apply(&result.operator, &v).unwrap();
        let via_predict = predict(&result.operator, &v).unwrap();
        assert_eq!(direct.values(), via_predict.values());

        // Band-limited input at double resolution, then restricted, matches
        // the same-resolution prediction.
        let _ = t_star;
        let fine_spec = GridSpec::new(2, 32).unwrap();
        let mut s = crate::grf::sample_grf_spectrum(
            &GrfConfig::new(fine_spec, 2.0, 10.0, 9).unwrap(),
        );
        let mut idx = alloc::vec![0usize; 2];
        for flat in 0..fine_spec.len() {
            fine_spec.unravel(flat, &mut idx);
            let m = crate::grid::mode_of_index(&idx, &fine_spec).unwrap();
            if m.linf() > 7 {
                s.coeffs_mut()[flat] = Complex64::new(0.0, 0.0);
            }
        }
        let v_fine = crate::spectrum::dft_inverse(&s).unwrap();
        let coarse_pred =
            predict(&result.operator, &restrict_to_grid(&v_fine, 16).unwrap()).unwrap();
        let fine_pred = restrict_to_grid(&predict(&result.operator, &v_fine).unwrap(), 16).unwrap();
        for (a, b) in coarse_pred.values().iter().zip(fine_pred.values().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_mse_examples() {
        let (t_star, data) = recipe_dataset(2, 16, 3, 3, 9);
        let noiseless = generate_dataset(&t_star, &grf(2, 16), false, 3, 10).unwrap();
        // Perfect predictor.
        assert!(relative_mse(&t_star, &noiseless).unwrap() < 1e-20);

        // Zero predictor on a single pair: ‖w‖²/‖w‖ = ‖w‖.
        let single = Dataset::new(
            *noiseless.spec(),
            alloc::vec![noiseless.pairs()[0].clone()],
        )
        .unwrap();
        let zero = DiagonalOperator::zero(2, 3, 1.0).unwrap();
        let got = relative_mse(&zero, &single).unwrap();
        let want = grid_l2_norm_sq(&noiseless.pairs()[0].1).sqrt();
        assert!((got - want).abs() < 1e-12 * want);

        // Hand-rolled two-pair computation.
        let result = fit_closed_form(&data, &FitConfig::closed_form(3, 2.0)).unwrap();
        let two = Dataset::new(
            *data.spec(),
            alloc::vec![data.pairs()[0].clone(), data.pairs()[1].clone()],
        )
        .unwrap();
        let got = relative_mse(&result.operator, &two).unwrap();
        let mut want = 0.0;
        for (v, w) in two.pairs() {
            let p = apply(&result.operator, v).unwrap();
            want += grid_l2_norm_sq(&w.sub(&p).unwrap()) / grid_l2_norm_sq(w).sqrt();
        }
        want /= 2.0;
        assert!((got - want).abs() < 1e-12 * want.max(1.0));

        // Squared-denominator variant.
        let sq = relative_mse_with(&zero, &single, Denominator::NormSquared).unwrap();
        assert!((sq - 1.0).abs() < 1e-12);

        // Zero-norm target is rejected with the offending index.
        let spec = *data.spec();
        let vz = sample_grf(&grf(2, 16).with_seed(77));
        let wz = GridField::constant(spec, 0.0).unwrap();
        let degenerate = Dataset::new(spec, alloc::vec![(vz, wz)]).unwrap();
        assert!(matches!(
            relative_mse(&zero, &degenerate),
            Err(Error::ZeroNormTarget { index: 0 })
        ));
    }

    #[test]
    fn excess_risk_examples() {
        let (t_star, _) = recipe_dataset(2, 16, 3, 3, 12);
        let noiseless = generate_dataset(&t_star, &grf(2, 16), false, 8, 13).unwrap();
        // Identical operators: exactly zero.
        let zero_gap = empirical_excess_risk(&t_star, &t_star, &noiseless).unwrap();
        assert_eq!(zero_gap, 0.0);

        // Zero estimator on noiseless data: (1/n)Σ‖w‖².
        let zero = DiagonalOperator::zero(2, 3, 2.0).unwrap();
        let got = empirical_excess_risk(&zero, &t_star, &noiseless).unwrap();
        let want: f64 = noiseless
            .pairs()
            .iter()
            .map(|(_, w)| grid_l2_norm_sq(w))
            .sum::<f64>()
            / noiseless.n() as f64;
        assert!((got - want).abs() < 1e-12 * want);

        // With symmetric noise the excess of a fitted operator against the
        // generator is non-negative up to Monte Carlo noise (−3 SE floor).
        let noisy = generate_dataset(&t_star, &grf(2, 16), true, 1000, 14).unwrap();
        let fit_res = fit_closed_form(&noisy, &FitConfig::closed_form(3, 2.0)).unwrap();
        let mut samples = Vec::with_capacity(noisy.n());
        for (v, w) in noisy.pairs() {
            let est = apply(&fit_res.operator, v).unwrap();
            let refp = apply(&t_star, v).unwrap();
            samples
                .push(grid_l2_norm_sq(&w.sub(&est).unwrap()) - grid_l2_norm_sq(&w.sub(&refp).unwrap()));
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / (samples.len() as f64 - 1.0);
        let se = (var / samples.len() as f64).sqrt();
        assert!(mean >= -3.0 * se, "mean {mean:e}, se {se:e}");
    }
}
