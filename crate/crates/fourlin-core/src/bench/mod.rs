//! Numerical verification harnesses: the three error sweeps, spectral
//! inequality checks, the high-mode counterexample, and the adversarial
//! lower-bound construction with exact finite-support risk evaluation.

pub mod counterexample;
pub mod lemmas;
pub mod lowerbound;
pub mod sweeps;

pub use counterexample::{high_mode_counterexample, CounterexampleReport};
pub use lemmas::{
    check_aliasing, check_coefficient_decay, check_tail_sum, check_weighted_sum,
    lattice_tail_sum, AliasingReport, CheckReport, LatticeTailSum,
};
pub use lowerbound::{
    build_adversarial_distribution, exact_risk, exact_risk_sign_comparator, sample_training_set,
    theorem_rhs, verify_lower_bound, Atom, FiniteSupportDistribution, LowerBoundReport,
    SparseField,
};
pub use sweeps::{
    discretization_cell, statistical_cell, sweep_discretization, sweep_statistical,
    sweep_truncation, CurvePoint, ErrorCurve, SweepBase, SweepParameter,
};
