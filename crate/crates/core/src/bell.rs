//! Maximal Bell factor, local-unitary normal form of the correlation matrix,
//! and the Euler-rotation bound oracles used to test the duality inequality.
//!
//! The Bell factor follows the correlation-matrix criterion: a state violates
//! a CHSH inequality iff `2 sqrt(u1 + u2) > 2`, with `u1 >= u2` the two
//! largest eigenvalues of `T^T T`.

use crate::linalg::{
    su2_from_rotation, svd3, sym3_eigen, Matrix2, Matrix3,
};
use crate::states::TwoQubitState;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("dominance precondition failed: |t33| = {t33:.3e} must not be smaller than |t11| = {t11:.3e} and |t22| = {t22:.3e}")]
    BadOrdering { t33: f64, t11: f64, t22: f64 },
    #[error("Euler angle {name} = {value} outside its range")]
    AngleOutOfRange { name: &'static str, value: f64 },
}

/// Maximal Bell factor `2 sqrt(u1 + u2)` from the two largest eigenvalues of
/// `T^T T`; values above 2 signal Bell-inequality violation, capped by
/// `2 sqrt(2)` for physical states.
pub fn bell_max(s: &TwoQubitState) -> f64 {
    let t = s.bloch().t;
    let (w, _) = sym3_eigen(&(t.transpose() * t));
    2.0 * (w[0].max(0.0) + w[1].max(0.0)).sqrt()
}

/// Local-unitary normal form: unitaries `(u_s, u_m)` that diagonalize the
/// correlation matrix, with the diagonal reported in slot order
/// `(t33, t11, t22)` by descending magnitude (the dominant correlation sits
/// in the z slot, the runner-up in x).
#[derive(Debug, Clone)]
pub struct NormalForm {
    /// Diagonal of the normal-form correlation matrix as `[t33, t11, t22]`,
    /// so `|tbar[0]| >= |tbar[1]| >= |tbar[2]|`. Entries may be negative:
    /// sign flips needed to keep the rotations proper are carried here.
    pub tbar: [f64; 3],
    /// System Bloch vector after the transformation.
    pub nbar: [f64; 3],
    /// Meter Bloch vector after the transformation.
    pub mbar: [f64; 3],
    pub u_s: Matrix2,
    pub u_m: Matrix2,
}

/// Slot permutation sending the magnitude-sorted SVD diagonal
/// `(d0, d1, d2)` into matrix slots `(zz, xx, yy)`; a cyclic (proper)
/// permutation.
fn slot_permutation() -> Matrix3 {
    Matrix3([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
}

/// Compute the normal form of a state via the signed SVD of its correlation
/// matrix. Applying `(u_s, u_m)` to the state yields a diagonal correlation
/// matrix `diag(t11, t22, t33) = diag(tbar[1], tbar[2], tbar[0])`.
pub fn normal_form(s: &TwoQubitState) -> NormalForm {
    let b = s.bloch();
    let dec = svd3(&b.t);
    let p = slot_permutation();

    // T = O_L diag O_R^T = (O_L P^T) Tbar (O_R P^T)^T with Tbar the diagonal
    // in slot order, so the state must be rotated by the transposes.
    let o_s = dec.rot_left * p.transpose();
    let o_m = dec.rot_right * p.transpose();
    let rot_s = o_s.transpose();
    let rot_m = o_m.transpose();

    NormalForm {
        tbar: dec.diag,
        nbar: rot_s.apply(&b.n),
        mbar: rot_m.apply(&b.m),
        u_s: su2_from_rotation(&rot_s),
        u_m: su2_from_rotation(&rot_m),
    }
}

/// Euler angles of the rotation `R_z(alpha) R_y(beta) R_z(gamma)` with
/// `alpha, gamma in [0, 2pi)` and `beta in [0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, BellError> {
        if !(0.0..TAU).contains(&alpha) {
            return Err(BellError::AngleOutOfRange {
                name: "alpha",
                value: alpha,
            });
        }
        if !(0.0..PI).contains(&beta) {
            return Err(BellError::AngleOutOfRange {
                name: "beta",
                value: beta,
            });
        }
        if !(0.0..TAU).contains(&gamma) {
            return Err(BellError::AngleOutOfRange {
                name: "gamma",
                value: gamma,
            });
        }
        Ok(EulerAngles { alpha, beta, gamma })
    }
}

/// The rotation matrix for a set of Euler angles, written out entrywise.
pub fn euler_rotation(e: &EulerAngles) -> Matrix3 {
    let (sa, ca) = e.alpha.sin_cos();
    let (sb, cb) = e.beta.sin_cos();
    let (sg, cg) = e.gamma.sin_cos();
    Matrix3([
        [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
        [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
        [-sb * cg, sb * sg, cb],
    ])
}

/// Upper bounds on the two squared distinguishability excesses of a state
/// whose diagonal correlation matrix `tbar = [t33, t11, t22]` (dominant entry
/// first) is rotated on the system side by the Euler rotation.
///
/// `bound1` caps the excess along z; `bound2` caps the complementary one,
/// along x when `t11^2 >= t22^2` and along y otherwise. The two bounds sum to
/// at most `t33^2 + max(t11, t22)^2 = (B_max/2)^2`.
pub fn rotated_excess_bounds(
    tbar: &[f64; 3],
    e: &EulerAngles,
) -> Result<(f64, f64), BellError> {
    let [t33, t11, t22] = *tbar;
    if t33.abs() + 1e-15 < t11.abs() || t33.abs() + 1e-15 < t22.abs() {
        return Err(BellError::BadOrdering {
            t33: t33.abs(),
            t11: t11.abs(),
            t22: t22.abs(),
        });
    }
    let (sa, ca) = e.alpha.sin_cos();
    let (sb, cb) = e.beta.sin_cos();
    let (sg, cg) = e.gamma.sin_cos();
    let (t33_2, t11_2, t22_2) = (t33 * t33, t11 * t11, t22 * t22);

    // Squared norm of the z row of the rotated correlation matrix; exact for
    // vanishing Bloch vectors, an upper bound otherwise.
    let bound1 = t33_2 * cb * cb + sb * sb * (t11_2 * cg * cg + t22_2 * sg * sg);
    let bound2 = if t11_2 >= t22_2 {
        t11_2 * (ca * cb * cg - sa * sg).powi(2)
            + t22_2 * (ca * cb * sg + sa * cg).powi(2)
            + t33_2 * ca * ca * sb * sb
    } else {
        t11_2 * (sa * cb * cg + ca * sg).powi(2)
            + t22_2 * (-sa * cb * sg + ca * cg).powi(2)
            + t33_2 * sa * sa * sb * sb
    };
    Ok((bound1, bound2))
}
