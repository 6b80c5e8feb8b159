//! Numerical checks of the spectral inequalities underpinning the error
//! rates: coefficient decay, weighted and tail coefficient sums, the
//! aliasing identity on coarse grids, and the ℓ∞ lattice tail sum.
//!
//! Each check evaluates both sides of its inequality exactly on a concrete
//! field and reports violations with a witness; the tolerance only absorbs
//! round-off.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{mode_of_index, GridSpec, Mode};
use crate::math;
use crate::operator::restrict_to_grid;
use crate::spectrum::{dft_forward, dft_inverse, sobolev_norm_sq, SpectrumField};

/// Round-off slack added to the right-hand side of each inequality.
pub const CHECK_SLACK: f64 = 1e-10;

/// Outcome of one inequality check over the modes of a spectrum.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckReport {
    pub name: &'static str,
    /// Number of (mode or sum) comparisons made.
    pub cases: usize,
    /// Human-readable witnesses of any violations.
    pub violations: Vec<String>,
    /// Smallest observed `rhs − lhs` (negative means a violation).
    pub min_slack: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Coefficient decay: `|⟨φ_{−m},u⟩| ≤ ‖u‖_{ℋ^s} / ((2π)^s·|m|_∞^s)` for
/// every represented `m ≠ 0`.
pub fn check_coefficient_decay(u: &SpectrumField, s: u32) -> CheckReport {
    let spec = u.spec();
    let norm = math::sqrt(sobolev_norm_sq(u, s));
    let two_pi_pow = math::powi(2.0 * core::f64::consts::PI, s as i32);
    let mut report = CheckReport {
        name: "coefficient_decay",
        cases: 0,
        violations: Vec::new(),
        min_slack: f64::INFINITY,
    };
    let mut idx = vec![0usize; spec.d()];
    for (flat, c) in u.coeffs().iter().enumerate() {
        spec.unravel(flat, &mut idx);
        let mode = mode_of_index(&idx, spec).expect("indices in range");
        if mode.linf() == 0 {
            continue;
        }
        let lhs = c.norm();
        let rhs = norm / (two_pi_pow * math::powi(mode.linf() as f64, s as i32));
        let slack = rhs - lhs;
        report.cases += 1;
        if slack < report.min_slack {
            report.min_slack = slack;
        }
        if lhs > rhs + CHECK_SLACK {
            report
                .violations
                .push(alloc::format!("mode {mode}: |coeff| {lhs:e} > bound {rhs:e}"));
        }
    }
    report
}

/// Weighted coefficient sum: `Σ_m (1+|m|_∞^{2s})·|⟨φ_{−m},u⟩|² ≤ ‖u‖²_{ℋ^s}`.
pub fn check_weighted_sum(u: &SpectrumField, s: u32) -> CheckReport {
    let spec = u.spec();
    let norm_sq = sobolev_norm_sq(u, s);
    let mut lhs = 0.0;
    let mut idx = vec![0usize; spec.d()];
    for (flat, c) in u.coeffs().iter().enumerate() {
        spec.unravel(flat, &mut idx);
        let mode = mode_of_index(&idx, spec).expect("indices in range");
        lhs += (1.0 + math::powi(mode.linf() as f64, 2 * s as i32)) * c.norm_sqr();
    }
    let slack = norm_sq - lhs;
    CheckReport {
        name: "weighted_sum",
        cases: 1,
        violations: if lhs > norm_sq + CHECK_SLACK * norm_sq.max(1.0) {
            alloc::vec![alloc::format!("weighted sum {lhs:e} > ‖u‖² {norm_sq:e}")]
        } else {
            Vec::new()
        },
        min_slack: slack,
    }
}

/// Tail sum: `Σ_{|m|_∞>K} |⟨φ_{−m},u⟩|² ≤ ‖u‖²_{ℋ^s} / K^{2s}` over the
/// grid-represented tail modes.
pub fn check_tail_sum(u: &SpectrumField, s: u32, k: usize) -> CheckReport {
    let spec = u.spec();
    let norm_sq = sobolev_norm_sq(u, s);
    let mut tail = 0.0;
    let mut cases = 0usize;
    let mut idx = vec![0usize; spec.d()];
    for (flat, c) in u.coeffs().iter().enumerate() {
        spec.unravel(flat, &mut idx);
        let mode = mode_of_index(&idx, spec).expect("indices in range");
        if mode.linf() > k as u64 {
            tail += c.norm_sqr();
            cases += 1;
        }
    }
    let rhs = norm_sq / math::powi(k as f64, 2 * s as i32);
    CheckReport {
        name: "tail_sum",
        cases: cases.max(1),
        violations: if tail > rhs + CHECK_SLACK * rhs.max(1.0) {
            alloc::vec![alloc::format!("tail {tail:e} > bound {rhs:e} at K={k}")]
        } else {
            Vec::new()
        },
        min_slack: rhs - tail,
    }
}

/// Outcome of the aliasing identity check at one mode.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AliasingReport {
    /// `|DFT(u^N)(−m) − ⟨φ_{−m},u⟩|`.
    pub lhs: f64,
    /// `|Σ_{ℓ≠0} ⟨φ_{−(ℓN+m)},u⟩|` — the folded alias sum.
    pub rhs: f64,
    /// `rhs − lhs`; for band-limited fields the identity is an equality, so
    /// this sits at round-off.
    pub slack: f64,
    pub passed: bool,
}

/// Aliasing bound on a coarse grid: for a band-limited `u` given by its
/// spectrum on a fine grid, the coarse-grid DFT error at mode `m` equals the
/// alias sum over `m + ℓN`. Both sides are finite sums and are evaluated
/// exactly.
///
/// The coarse size must divide the fine size and `|m|_∞ < N_coarse`.
pub fn check_aliasing(u: &SpectrumField, n_coarse: usize, m: &Mode) -> Result<AliasingReport> {
    let fine = *u.spec();
    if m.linf() >= n_coarse as u64 {
        return Err(Error::IndexOutOfRange(alloc::format!(
            "mode {m} out of range for coarse grid N={n_coarse}"
        )));
    }
    let coarse_spec = GridSpec::new(fine.d(), n_coarse)?;
    // Representable on the coarse grid, where the coarse DFT lives.
    let coarse_idx = crate::grid::index_of_mode(m, &coarse_spec)?;

    let field = dft_inverse(u)?;
    let coarse_field = restrict_to_grid(&field, n_coarse)?;
    let coarse_hat = dft_forward(&coarse_field)?;
    let dft_value = coarse_hat.coeffs()[coarse_spec.ravel(&coarse_idx)];

    let true_coeff = u.coeff_at(m).unwrap_or(num_complex::Complex64::new(0.0, 0.0));

    // Alias sum: every fine-grid mode k ≠ m with k ≡ m (mod N_coarse).
    let mut alias = num_complex::Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; fine.d()];
    for (flat, c) in u.coeffs().iter().enumerate() {
        fine.unravel(flat, &mut idx);
        let k = mode_of_index(&idx, &fine).expect("indices in range");
        if k == *m {
            continue;
        }
        let congruent = k
            .components()
            .iter()
            .zip(m.components().iter())
            .all(|(a, b)| (a - b).rem_euclid(n_coarse as i64) == 0);
        if congruent {
            alias += c;
        }
    }

    let lhs = (dft_value - true_coeff).norm();
    let rhs = alias.norm();
    Ok(AliasingReport { lhs, rhs, slack: rhs - lhs, passed: lhs <= rhs + CHECK_SLACK })
}

/// Partial lattice tail sum `Σ_{k∈ℤ^d∖{0}} |k|_∞^{−2s}` with a rigorous
/// remainder interval, against the bound `π²·3^{d−2}`.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticeTailSum {
    pub partial: f64,
    pub remainder_lo: f64,
    pub remainder_hi: f64,
    pub bound: f64,
}

impl LatticeTailSum {
    /// Certified lower estimate of the true sum.
    pub fn lower(&self) -> f64 {
        self.partial + self.remainder_lo
    }

    /// Certified upper estimate of the true sum.
    pub fn upper(&self) -> f64 {
        self.partial + self.remainder_hi
    }

    /// Whether `x` lies inside the certified interval.
    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }

    /// The sum provably does not exceed the bound (up to the remainder
    /// interval): the certified lower estimate stays below it.
    pub fn within_bound(&self) -> bool {
        self.lower() <= self.bound + 1e-12
    }
}

/// Evaluate `Σ_{k∈ℤ^d∖{0}} 1/|k|_∞^{2s}` by exact shells up to `cutoff`
/// (there are `(2j+1)^d − (2j−1)^d` modes with `|k|_∞ = j`), plus
/// integral-test remainder bounds. Requires `2s > d` for convergence.
pub fn lattice_tail_sum(s: u32, d: usize, cutoff: usize) -> Result<LatticeTailSum> {
    if 2 * s as usize <= d {
        return Err(Error::DivergentSum { s, d });
    }
    if cutoff == 0 {
        return Err(Error::InvalidParameter(String::from("cutoff must be >= 1")));
    }
    let mut partial = 0.0f64;
    for j in 1..=cutoff {
        let outer = (2 * j as u128 + 1).pow(d as u32);
        let inner = (2 * j as u128 - 1).pow(d as u32);
        partial += (outer - inner) as f64 / math::powi(j as f64, 2 * s as i32);
    }
    // The shell count is bracketed by 2d·(2j−1)^{d−1} ≤ count(j) ≤
    // 2d·(2j+1)^{d−1} ≤ 2d·3^{d−1}·j^{d−1}, and the integral test brackets
    // Σ_{j>J} j^{d−1−2s}.
    let p = 2.0 * s as f64 - d as f64; // > 0
    let j1 = cutoff as f64 + 1.0;
    let remainder_hi =
        2.0 * d as f64 * math::powi(3.0, d as i32 - 1) * math::powf(cutoff as f64, -p) / p;
    let remainder_lo = 2.0 * d as f64 * math::powf(j1, -p) / p;
    let bound = math::powi(core::f64::consts::PI, 2) * math::powi(3.0, d as i32 - 2);
    Ok(LatticeTailSum { partial, remainder_lo, remainder_hi, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grf::{sample_grf_spectrum, GrfConfig};
    use crate::grid::{index_of_mode, GridField};
    use crate::seed::derive;
    use num_complex::Complex64;

    fn grf_spectrum(d: usize, n: usize, seed: u64) -> SpectrumField {
        sample_grf_spectrum(&GrfConfig::new(GridSpec::new(d, n).unwrap(), 2.0, 1.0, seed).unwrap())
    }

    fn single_mode(spec: GridSpec, comps: &[i64]) -> SpectrumField {
        let mut s = SpectrumField::zero(spec);
        let m = Mode::new(comps.to_vec());
        let idx = index_of_mode(&m, &spec).unwrap();
        s.coeffs_mut()[spec.ravel(&idx)] = Complex64::new(1.0, 0.0);
        let neg_idx = index_of_mode(&m.neg(), &spec).unwrap();
        s.coeffs_mut()[spec.ravel(&neg_idx)] = Complex64::new(1.0, 0.0);
        s
    }

    #[test]
    fn decay_bound_on_single_mode_and_constant() {
        let spec = GridSpec::new(1, 32).unwrap();
        let s = single_mode(spec, &[3]);
        let report = check_coefficient_decay(&s, 1);
        assert!(report.passed());
        assert!(report.min_slack.is_finite() && report.min_slack >= 0.0);

        // Constant field: no nonzero modes, vacuous pass.
        let c = dft_forward(&GridField::constant(spec, 4.0).unwrap()).unwrap();
        let report = check_coefficient_decay(&c, 2);
        assert!(report.passed());
        assert_eq!(report.cases, spec.len() - 1);
    }

    #[test]
    fn decay_bound_over_grf_corpus() {
        for t in 0..100 {
            let s = grf_spectrum(2, 16, derive(1, 0, t));
            let report = check_coefficient_decay(&s, 1);
            assert!(report.passed(), "draw {t}: {:?}", report.violations);
        }
    }

    #[test]
    fn weighted_sum_bound_over_grf_corpus() {
        for t in 0..50 {
            let s = grf_spectrum(2, 16, derive(2, 0, t));
            let report = check_weighted_sum(&s, 1);
            assert!(report.passed(), "draw {t}");
        }
    }

    #[test]
    fn tail_sum_edge_cases_and_corpus() {
        let spec = GridSpec::new(1, 32).unwrap();
        // K at or above Nyquist: tail empty, 0 ≤ bound.
        let s = grf_spectrum(1, 32, 3);
        let report = check_tail_sum(&s, 1, 16);
        assert!(report.passed());

        // Single mode just beyond K: tail is exactly its energy.
        let sm = single_mode(spec, &[5]);
        let report = check_tail_sum(&sm, 1, 4);
        assert!(report.passed());
        let norm_sq = sobolev_norm_sq(&sm, 1);
        assert!(report.min_slack <= norm_sq / 16.0);

        for t in 0..100 {
            let s = grf_spectrum(2, 16, derive(3, 0, t));
            for k in [1usize, 2, 4] {
                assert!(check_tail_sum(&s, 1, k).passed(), "draw {t} K={k}");
            }
        }
    }

    #[test]
    fn aliasing_identity_cases() {
        let fine = GridSpec::new(1, 32).unwrap();
        // Band-limited below the coarse Nyquist: no aliasing at all.
        let mut low = SpectrumField::zero(fine);
        for comp in [-3i64, -1, 0, 1, 3] {
            let idx = index_of_mode(&Mode::new(alloc::vec![comp]), &fine).unwrap();
            low.coeffs_mut()[fine.ravel(&idx)] = Complex64::new(0.25, 0.0);
        }
        let report = check_aliasing(&low, 8, &Mode::new(alloc::vec![1])).unwrap();
        assert!(report.passed);
        assert!(report.lhs < 1e-12);

        // Single high mode m + Nℓ: the grid sees it at m exactly.
        let spec = GridSpec::new(1, 64).unwrap();
        let high = single_mode(spec, &[10]); // 10 ≡ 2 (mod 8)
        let report = check_aliasing(&high, 8, &Mode::new(alloc::vec![2])).unwrap();
        assert!(report.passed);
        assert!((report.lhs - 1.0).abs() < 1e-12, "lhs {}", report.lhs);
        assert!((report.rhs - 1.0).abs() < 1e-12);

        // Random band-limited fields: equality within round-off.
        for t in 0..50 {
            let s = grf_spectrum(2, 32, derive(4, 0, t));
            let report = check_aliasing(&s, 8, &Mode::new(alloc::vec![1, -2])).unwrap();
            assert!(report.passed, "draw {t}");
            assert!(report.slack.abs() < 1e-10, "draw {t}: slack {}", report.slack);
        }

        assert!(check_aliasing(&low, 8, &Mode::new(alloc::vec![9])).is_err());
    }

    #[test]
    fn lattice_sum_basel_edge() {
        // d=1, s=1: the true sum is 2·ζ(2) = π²/3, exactly the bound.
        let r = lattice_tail_sum(1, 1, 2_500_000).unwrap();
        assert!(r.remainder_hi < 1e-6);
        let basel = core::f64::consts::PI.powi(2) / 3.0;
        assert!(r.contains(basel), "interval [{:e},{:e}]", r.lower(), r.upper());
        assert!(r.within_bound());
        assert!((r.bound - basel).abs() < 1e-12);
    }

    #[test]
    fn lattice_sum_two_dimensional() {
        let r = lattice_tail_sum(2, 2, 4000).unwrap();
        assert!(r.upper() < r.bound, "sum {:e} vs bound {:e}", r.upper(), r.bound);
        // Larger cutoffs increase the partial sum monotonically and stay
        // below the bound.
        let r2 = lattice_tail_sum(2, 2, 8000).unwrap();
        assert!(r2.partial > r.partial);
        assert!(r2.upper() < r2.bound);
        // Shells of size 8j give Σ 8j/j⁴ = 8ζ(3); the interval must cover it.
        let eight_zeta3 = 8.0 * 1.202_056_903_159_594_3;
        assert!(r.contains(eight_zeta3), "[{:e},{:e}]", r.lower(), r.upper());
    }

    #[test]
    fn lattice_sum_divergence_rejected() {
        assert!(matches!(lattice_tail_sum(1, 2, 100), Err(Error::DivergentSum { .. })));
    }
}
