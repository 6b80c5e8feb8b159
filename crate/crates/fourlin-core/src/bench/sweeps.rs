//! The three error sweeps: relative test error against sample size (the
//! statistical component), against truncation (the truncation component,
//! on fixed data), and against training resolution with evaluation at a
//! finer test grid (the discretization component).
//!
//! Data follow the standard recipe: inputs from `N(0, σ²(−∇²+I)^{−γ})`, a
//! random diagonal operator with `λ_m ~ Unif(−bound, bound)` capped at the
//! generation grid's Nyquist range, targets `w = T⋆v + ε` with smooth noise
//! on the training side. Test targets are noiseless, so the reported error
//! measures the estimator, not the noise floor. Every cell is pure given
//! the master seed, which lets callers run cells in any order or in
//! parallel and aggregate deterministically.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimator::{relative_mse, fit_closed_form, FitAccumulator, FitConfig};
use crate::grf::GrfConfig;
use crate::grid::GridSpec;
use crate::math;
use crate::operator::{
    generate_dataset, generate_pair, restrict_to_grid, synthesize_random_operator, Dataset,
    DiagonalOperator,
};
use crate::seed::{derive, derive2};

/// Which experiment knob a curve sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SweepParameter {
    /// Training sample count `n`.
    SampleCount,
    /// Estimator truncation `K`.
    Truncation,
    /// Training grid size `N`.
    Resolution,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::SampleCount => "n",
            SweepParameter::Truncation => "K",
            SweepParameter::Resolution => "N",
        }
    }
}

/// One swept value with its error statistics over seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub value: f64,
    pub mean_rel_mse: f64,
    /// Sample standard deviation over seeds (zero for a single seed).
    pub std_rel_mse: f64,
    pub n_seeds: usize,
}

/// Full experiment configuration shared by the sweep cells.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepBase {
    pub d: usize,
    /// Input-field smoothness exponent.
    pub gamma: f64,
    /// Input-field amplitude scale.
    pub sigma: f64,
    /// Parameter range of the random ground truth, and the fit constraint.
    pub bound: f64,
    /// Additive smooth noise on training targets.
    pub noise: bool,
    /// Test pairs per cell (noiseless targets).
    pub n_test: usize,
    /// Redraw the ground-truth operator per seed (otherwise it is shared).
    pub redraw_operator: bool,
    pub master_seed: u64,
}

impl Default for SweepBase {
    fn default() -> Self {
        Self {
            d: 2,
            gamma: 2.0,
            sigma: 10.0,
            bound: 2.0,
            noise: true,
            n_test: 100,
            redraw_operator: true,
            master_seed: 0x464c4e,
        }
    }
}

/// Metadata carried by a finished curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepMeta {
    pub base: SweepBase,
    /// Training grid size (statistical/truncation) or test grid size
    /// (discretization).
    pub grid_n: usize,
    pub k: Option<usize>,
    pub n_train: Option<usize>,
    pub n_seeds: usize,
}

/// An error curve: points sorted ascending in the swept parameter.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorCurve {
    pub parameter: SweepParameter,
    pub points: Vec<CurvePoint>,
    pub meta: SweepMeta,
}

impl ErrorCurve {
    /// Number of adjacent increases along the curve (an exactly
    /// non-increasing curve has zero).
    pub fn inversions(&self) -> usize {
        self.points
            .windows(2)
            .filter(|w| w[1].mean_rel_mse > w[0].mean_rel_mse)
            .count()
    }

    /// Least-squares log-log slope over the middle third of the curve,
    /// dodging the small-parameter transient and the error floor.
    pub fn middle_third_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|p| (p.value, p.mean_rel_mse))
            .collect();
        let len = pts.len();
        let (mut lo, mut hi) = (len / 3, len - len / 3);
        while hi - lo < 2 {
            lo = lo.saturating_sub(1);
            hi = (hi + 1).min(len);
        }
        log_log_slope(&pts[lo..hi])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let lx = math::ln(x);
        let ly = math::ln(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

// Seed streams of the sweep cells.
const STREAM_OPERATOR: u64 = 100;
const STREAM_TEST: u64 = 101;
const STREAM_TRAIN: u64 = 102;

fn grf_config(base: &SweepBase, grid_n: usize) -> Result<GrfConfig> {
    GrfConfig::new(GridSpec::new(base.d, grid_n)?, base.gamma, base.sigma, 0)
}

/// Ground truth for a seed cell: random diagonal parameters over the whole
/// Nyquist-free range of the generation grid.
fn ground_truth(base: &SweepBase, grid_n: usize, seed_idx: u64) -> Result<DiagonalOperator> {
    let spec = GridSpec::new(base.d, grid_n)?;
    let op_seed = if base.redraw_operator { seed_idx } else { 0 };
    synthesize_random_operator(
        base.d,
        spec.max_safe_mode(),
        base.bound,
        derive(base.master_seed, STREAM_OPERATOR, op_seed),
        true,
    )
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, math::sqrt(var))
}

/// One statistical-sweep cell: fresh ground truth and data for
/// `(seed_idx, n_train)`, fit at truncation `k`, relative error on the
/// seed's fixed noiseless test set.
pub fn statistical_cell(
    base: &SweepBase,
    grid_n: usize,
    k: usize,
    n_train: usize,
    seed_idx: u64,
) -> Result<f64> {
    let t_star = ground_truth(base, grid_n, seed_idx)?;
    let grf = grf_config(base, grid_n)?;
    let test = generate_dataset(
        &t_star,
        &grf,
        false,
        base.n_test,
        derive(base.master_seed, STREAM_TEST, seed_idx),
    )?;
    let train = generate_dataset(
        &t_star,
        &grf,
        base.noise,
        n_train,
        derive2(base.master_seed, STREAM_TRAIN, seed_idx, n_train as u64),
    )?;
    let fitted = fit_closed_form(&train, &FitConfig::closed_form(k, base.bound))?;
    relative_mse(&fitted.operator, &test)
}

/// Sweep the training sample count at fixed resolution and truncation.
///
/// Per (n, seed) cell the recipe is replayed with a fresh ground truth per
/// seed; the test set is fixed across the swept parameter within a seed.
pub fn sweep_statistical(
    base: &SweepBase,
    grid_n: usize,
    k: usize,
    n_list: &[usize],
    n_seeds: usize,
) -> Result<ErrorCurve> {
    if n_list.is_empty() || n_seeds == 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "statistical sweep needs at least one n and one seed"
        )));
    }
    let mut values: Vec<usize> = n_list.to_vec();
    values.sort_unstable();
    values.dedup();

    let mut points = Vec::with_capacity(values.len());
    for &n_train in &values {
        let cells: Result<Vec<f64>> = (0..n_seeds)
            .map(|s| statistical_cell(base, grid_n, k, n_train, s as u64))
            .collect();
        let cells = cells?;
        let (mean, std) = mean_std(&cells);
        points.push(CurvePoint {
            value: n_train as f64,
            mean_rel_mse: mean,
            std_rel_mse: std,
            n_seeds,
        });
    }
    Ok(ErrorCurve {
        parameter: SweepParameter::SampleCount,
        points,
        meta: SweepMeta { base: *base, grid_n, k: Some(k), n_train: None, n_seeds },
    })
}

/// Sweep the truncation level on one fixed train/test draw.
///
/// The closed form is mode-local, so the full-truncation fit is computed
/// once and restricted per `K`; the reported error is therefore exactly the
/// per-`K` refit on the same data.
pub fn sweep_truncation(
    base: &SweepBase,
    grid_n: usize,
    n_train: usize,
    k_list: &[usize],
) -> Result<ErrorCurve> {
    if k_list.is_empty() {
        return Err(Error::InvalidParameter(alloc::format!("truncation sweep needs K values")));
    }
    let mut values: Vec<usize> = k_list.to_vec();
    values.sort_unstable();
    values.dedup();
    let k_max = *values.last().expect("non-empty");
    if 2 * k_max > grid_n {
        return Err(Error::TruncationTooLarge { k: k_max, n: grid_n });
    }

    let t_star = ground_truth(base, grid_n, 0)?;
    let grf = grf_config(base, grid_n)?;
    let test = generate_dataset(
        &t_star,
        &grf,
        false,
        base.n_test,
        derive(base.master_seed, STREAM_TEST, 0),
    )?;
    let train = generate_dataset(
        &t_star,
        &grf,
        base.noise,
        n_train,
        derive2(base.master_seed, STREAM_TRAIN, 0, n_train as u64),
    )?;
    let full = fit_closed_form(&train, &FitConfig::closed_form(k_max, base.bound))?;

    let mut points = Vec::with_capacity(values.len());
    for &k in &values {
        let truncated = full.operator.truncate(k.min(full.operator.k()))?;
        let err = relative_mse(&truncated, &test)?;
        points.push(CurvePoint { value: k as f64, mean_rel_mse: err, std_rel_mse: 0.0, n_seeds: 1 });
    }
    Ok(ErrorCurve {
        parameter: SweepParameter::Truncation,
        points,
        meta: SweepMeta { base: *base, grid_n, k: None, n_train: Some(n_train), n_seeds: 1 },
    })
}

/// One discretization cell: stream the training pairs generated at the test
/// resolution, restrict each to the `n_coarse` grid, fit at the coarse
/// Nyquist (`K = N/2`, Nyquist column excluded), and evaluate predictions
/// at the full test resolution against the shared noiseless test set.
pub fn discretization_cell(
    base: &SweepBase,
    n_coarse: usize,
    n_test_grid: usize,
    n_train: usize,
    test: &Dataset,
) -> Result<f64> {
    if n_coarse == 0 || n_test_grid % n_coarse != 0 {
        return Err(Error::NonDivisorRestriction { fine: n_test_grid, coarse: n_coarse });
    }
    let t_star = ground_truth(base, n_test_grid, 0)?;
    let grf = grf_config(base, n_test_grid)?;
    let coarse_spec = GridSpec::new(base.d, n_coarse)?;
    let cfg = FitConfig::closed_form(n_coarse / 2, base.bound);
    let mut acc = FitAccumulator::new(coarse_spec, &cfg)?;
    let train_seed = derive2(base.master_seed, STREAM_TRAIN, 0, n_train as u64);
    for i in 0..n_train {
        let (v, w) = generate_pair(&t_star, &grf, base.noise, train_seed, i)?;
        acc.add_pair(&restrict_to_grid(&v, n_coarse)?, &restrict_to_grid(&w, n_coarse)?)?;
    }
    let fitted = acc.finish()?;
    relative_mse(&fitted.operator, test)
}

/// Materialize the shared test set of a discretization sweep.
pub fn discretization_test_set(
    base: &SweepBase,
    n_test_grid: usize,
) -> Result<(DiagonalOperator, Dataset)> {
    let t_star = ground_truth(base, n_test_grid, 0)?;
    let grf = grf_config(base, n_test_grid)?;
    let test = generate_dataset(
        &t_star,
        &grf,
        false,
        base.n_test,
        derive(base.master_seed, STREAM_TEST, 0),
    )?;
    Ok((t_star, test))
}

/// Sweep the training grid size with evaluation at a fixed finer test grid.
///
/// Data are generated once per training pair at the test resolution and
/// folded into every requested coarse accumulator in a single streaming
/// pass, which keeps memory at the accumulator (not dataset) scale.
pub fn sweep_discretization(
    base: &SweepBase,
    n_list: &[usize],
    n_test_grid: usize,
    n_train: usize,
) -> Result<ErrorCurve> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter(alloc::format!("discretization sweep needs N values")));
    }
    let mut values: Vec<usize> = n_list.to_vec();
    values.sort_unstable();
    values.dedup();
    for &n in &values {
        if n == 0 || n_test_grid % n != 0 {
            return Err(Error::NonDivisorRestriction { fine: n_test_grid, coarse: n });
        }
    }

    let (t_star, test) = discretization_test_set(base, n_test_grid)?;
    let grf = grf_config(base, n_test_grid)?;

    let mut accs = Vec::with_capacity(values.len());
    for &n in &values {
        let coarse_spec = GridSpec::new(base.d, n)?;
        accs.push(FitAccumulator::new(coarse_spec, &FitConfig::closed_form(n / 2, base.bound))?);
    }
    let train_seed = derive2(base.master_seed, STREAM_TRAIN, 0, n_train as u64);
    for i in 0..n_train {
        let (v, w) = generate_pair(&t_star, &grf, base.noise, train_seed, i)?;
        for (&n, acc) in values.iter().zip(accs.iter_mut()) {
            acc.add_pair(&restrict_to_grid(&v, n)?, &restrict_to_grid(&w, n)?)?;
        }
    }

    let mut points = Vec::with_capacity(values.len());
    for (&n, acc) in values.iter().zip(accs.iter()) {
        let fitted = acc.finish()?;
        let err = relative_mse(&fitted.operator, &test)?;
        points.push(CurvePoint { value: n as f64, mean_rel_mse: err, std_rel_mse: 0.0, n_seeds: 1 });
    }
    Ok(ErrorCurve {
        parameter: SweepParameter::Resolution,
        points,
        meta: SweepMeta {
            base: *base,
            grid_n: n_test_grid,
            k: None,
            n_train: Some(n_train),
            n_seeds: 1,
        },
    })
}
