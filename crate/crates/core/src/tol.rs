//! Numerical tolerances used across the crate.
//!
//! Everything here is a fixed contract, not a tuning knob: tests and the
//! acceptance suite assert against these exact values.

/// Maximum allowed deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
/// Inputs within this window are symmetrized as `(h + h†)/2` before solving.
pub const HERMITICITY: f64 = 1e-10;

/// Density-matrix eigenvalues in `[-EIGENVALUE_CLAMP, 0)` are clamped to zero
/// (with trace renormalization); anything below is rejected as unphysical.
pub const EIGENVALUE_CLAMP: f64 = 1e-10;

/// Allowed deviation of a density-matrix trace from one.
pub const UNIT_TRACE: f64 = 1e-10;

/// Measurement axes are unit vectors to within this norm deviation.
pub const AXIS_NORM: f64 = 1e-12;

/// Measurement outcomes with probability at or below this threshold are
/// flagged zero-probability and excluded from conditional averages
/// (avoids 0/0 in the posterior weights).
pub const ZERO_OUTCOME: f64 = 1e-14;

/// Default tolerance on `|a1 . a2|` for two axes to count as complementary.
pub const COMPLEMENTARITY: f64 = 1e-9;

/// Slack tolerance when asserting the duality inequalities: a report counts
/// as a violation only when `rhs - lhs < -SLACK`.
pub const SLACK: f64 = 1e-9;

/// A duality report is "saturated" when `|rhs - lhs| <= SATURATION`. Looser
/// than [`SLACK`] because saturation compounds normal-form, filtering and
/// knowledge rounding.
pub const SATURATION: f64 = 1e-6;

/// Default convergence target for local filtering: iteration stops once
/// `|n| + |m|` (the two marginal Bloch norms) drops below this.
pub const FILTER_CONVERGENCE: f64 = 1e-8;

/// Default iteration cap for local filtering.
pub const FILTER_MAX_ITER: usize = 200;

/// Minimum marginal eigenvalue for filtering; below this the marginal is
/// treated as rank-deficient and filtering fails loudly.
pub const MARGINAL_RANK: f64 = 1e-9;

/// Traces below this are treated as zero when normalizing filtered states.
pub const ZERO_TRACE: f64 = 1e-14;
