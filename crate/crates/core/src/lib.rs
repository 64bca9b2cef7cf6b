//! Two-qubit knowledge-excess duality toolkit.
//!
//! Implements, for arbitrary two-qubit mixed states of a system qubit S and a
//! meter qubit M:
//!
//! - Bloch/correlation-tensor decomposition and the named state families
//!   (Bell mixtures, depolarized states, Werner states, Ginibre sampling);
//! - projective measurements, conditional state decompositions and the
//!   knowledge / knowledge-excess / distinguishability-excess functionals;
//! - the maximal Bell factor (correlation-matrix criterion), local-unitary
//!   normal forms and rotated-bound oracles;
//! - single-copy local filtering to Bell-diagonal form;
//! - a verification harness for the duality inequality
//!   `dK² + dK'² <= (B_max/2)²` and its same-meter unit-bound variant,
//!   including saturation searches and reproducible Monte Carlo sweeps.

pub mod bell;
pub mod filtering;
pub mod harness;
pub mod knowledge;
pub mod linalg;
pub mod measurement;
pub mod states;
pub mod tol;

pub use bell::{bell_max, euler_rotation, normal_form, rotated_excess_bounds, EulerAngles, NormalForm};
pub use filtering::{filter_to_bell_diagonal, verify_filter_monotonicity, FilterError, FilterOutcome};
pub use harness::{
    duality_trial, filtered_duality, same_meter_sweep, same_meter_trial, saturation_search,
    sweep_random, verify_duality, AxisMode, DualityReport, HarnessError, SweepSummary,
};
pub use knowledge::{
    apriori_knowledge, distinguishability_excess, distinguishability_excess_trace_norm, knowledge,
    optimal_meter_axis, KnowledgeResult,
};
pub use linalg::{Matrix2, Matrix3, Matrix4, Subsystem, C64};
pub use measurement::{
    decompose, is_complementary, outcome_statistics, ConditionalDecomposition, MeasurementAxis,
    MeasurementError, OutcomeStatistics,
};
pub use states::{
    bell_mixture, depolarized_state, random_state, werner, BlochForm, LocalFilter, StateError,
    TwoQubitState,
};
