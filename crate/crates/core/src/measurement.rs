//! Projective two-outcome qubit measurements and the conditional
//! decomposition they induce on a two-qubit state.
//!
//! A measurement is a Bloch axis `a`; outcome 0 is the projector along `+a`.
//! Decomposing a state along an axis on S yields weights `w`, `w⊥`, the
//! conditional meter states and the coherence operator; measuring the meter
//! then gives per-outcome probabilities and posterior weights.

use crate::linalg::{cr, dot3, dot_sigma, normalize3, Matrix2, Matrix4, C64};
use crate::states::TwoQubitState;
use crate::tol;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("axis vector is numerically zero and cannot be normalized")]
    DegenerateAxis,
}

/// A unit vector in R³ defining a projective qubit measurement; outcome 0 is
/// the projector `(1 + a.sigma)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MeasurementAxis {
    a: [f64; 3],
}

impl TryFrom<[f64; 3]> for MeasurementAxis {
    type Error = MeasurementError;
    fn try_from(v: [f64; 3]) -> Result<Self, MeasurementError> {
        MeasurementAxis::new(v)
    }
}

impl From<MeasurementAxis> for [f64; 3] {
    fn from(ax: MeasurementAxis) -> [f64; 3] {
        ax.a
    }
}

impl MeasurementAxis {
    /// Normalize a direction into an axis.
    pub fn new(v: [f64; 3]) -> Result<Self, MeasurementError> {
        if !v.iter().all(|x| x.is_finite()) {
            return Err(MeasurementError::DegenerateAxis);
        }
        let a = normalize3(&v).ok_or(MeasurementError::DegenerateAxis)?;
        Ok(MeasurementAxis { a })
    }

    pub fn x() -> Self {
        MeasurementAxis { a: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        MeasurementAxis { a: [0.0, 1.0, 0.0] }
    }

    /// The canonical default axis.
    pub fn z() -> Self {
        MeasurementAxis { a: [0.0, 0.0, 1.0] }
    }

    pub fn direction(&self) -> [f64; 3] {
        self.a
    }

    /// The orthogonal rank-1 projectors for outcomes 0 and 1; they sum to the
    /// identity and annihilate each other.
    pub fn projectors(&self) -> (Matrix2, Matrix2) {
        let s = dot_sigma(&self.a);
        let mut p0 = s.scale(0.5);
        let mut p1 = s.scale(-0.5);
        for m in [&mut p0, &mut p1] {
            m.0[0][0] += cr(0.5);
            m.0[1][1] += cr(0.5);
        }
        (p0, p1)
    }

    /// Eigenkets `(|psi>, |psi_perp>)` of `a.sigma` for eigenvalues +1 and -1,
    /// with a deterministic phase: the first nonzero component of each ket is
    /// real positive. Knowledge quantities are phase-independent; the pin just
    /// makes tests reproducible.
    pub fn basis_kets(&self) -> ([C64; 2], [C64; 2]) {
        let [a1, a2, a3] = self.a;
        // Branch on the pole for numerical stability.
        let (plus, minus): ([C64; 2], [C64; 2]) = if a3 >= 0.0 {
            (
                [cr(1.0 + a3), C64::new(a1, a2)],
                [C64::new(a1, -a2), cr(-(1.0 + a3))],
            )
        } else {
            (
                [C64::new(a1, -a2), cr(1.0 - a3)],
                [cr(-(1.0 - a3)), C64::new(a1, a2)],
            )
        };
        (fix_phase(normalize_ket(plus)), fix_phase(normalize_ket(minus)))
    }
}

fn normalize_ket(v: [C64; 2]) -> [C64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn fix_phase(v: [C64; 2]) -> [C64; 2] {
    let pivot = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
    let phase = pivot / pivot.norm();
    [v[0] * phase.conj(), v[1] * phase.conj()]
}

/// Two axes are complementary when `Tr P0 P0' = 1/2`, i.e. the Bloch axes are
/// orthogonal: `|a1 . a2| <= 2 tol`.
pub fn is_complementary(ax1: &MeasurementAxis, ax2: &MeasurementAxis, tol: f64) -> bool {
    dot3(&ax1.a, &ax2.a).abs() * 0.5 <= tol
}

// ---------------------------------------------------------------------------
// Conditional decomposition
// ---------------------------------------------------------------------------

/// Expansion of a two-qubit state along a system-qubit measurement basis:
///
/// `rho = w P_psi ⊗ rho_m + w_perp P_perp ⊗ rho_m_perp
///        + sqrt(w w_perp) (|psi_perp><psi| ⊗ chi_m + h.c.)`
///
/// where `sqrt(w w_perp) chi_m = <psi_perp| rho |psi>`.
#[derive(Debug, Clone)]
pub struct ConditionalDecomposition {
    pub w: f64,
    pub w_perp: f64,
    pub rho_m: Matrix2,
    pub rho_m_perp: Matrix2,
    pub chi_m: Matrix2,
    pub psi: [C64; 2],
    pub psi_perp: [C64; 2],
}

/// Decompose a state along a measurement axis on S. Zero-weight branches get
/// a maximally mixed placeholder meter state and `chi_m = 0`.
pub fn decompose(s: &TwoQubitState, pi_s: &MeasurementAxis) -> ConditionalDecomposition {
    let (psi, psi_perp) = pi_s.basis_kets();
    let rho = s.rho();

    // <x| rho |y> partial inner products over S; results act on M.
    let block = |bra: &[C64; 2], ket: &[C64; 2]| -> Matrix2 {
        let mut out = Matrix2::zero();
        for m in 0..2 {
            for mp in 0..2 {
                let mut acc = cr(0.0);
                for si in 0..2 {
                    for sj in 0..2 {
                        acc += bra[si].conj() * rho.0[2 * si + m][2 * sj + mp] * ket[sj];
                    }
                }
                out.0[m][mp] = acc;
            }
        }
        out
    };

    let w_rho = block(&psi, &psi);
    let w_perp_rho = block(&psi_perp, &psi_perp);
    let cross = block(&psi_perp, &psi);

    let w = w_rho.trace().re;
    let w_perp = w_perp_rho.trace().re;

    let half_mixed = Matrix2::identity().scale(0.5);
    let rho_m = if w > tol::ZERO_OUTCOME {
        w_rho.scale(1.0 / w)
    } else {
        half_mixed
    };
    let rho_m_perp = if w_perp > tol::ZERO_OUTCOME {
        w_perp_rho.scale(1.0 / w_perp)
    } else {
        half_mixed
    };
    let geom = (w.max(0.0) * w_perp.max(0.0)).sqrt();
    let chi_m = if geom > tol::ZERO_OUTCOME {
        cross.scale(1.0 / geom)
    } else {
        Matrix2::zero()
    };

    ConditionalDecomposition {
        w,
        w_perp,
        rho_m,
        rho_m_perp,
        chi_m,
        psi,
        psi_perp,
    }
}

impl ConditionalDecomposition {
    /// Reassemble the full two-qubit state from the decomposition.
    pub fn reconstruct(&self) -> Matrix4 {
        let p_psi = Matrix2::outer(&self.psi, &self.psi);
        let p_perp = Matrix2::outer(&self.psi_perp, &self.psi_perp);
        let lower = Matrix2::outer(&self.psi_perp, &self.psi); // |psi_perp><psi|
        let upper = lower.adjoint();
        let geom = (self.w.max(0.0) * self.w_perp.max(0.0)).sqrt();

        let mut rho = Matrix4::zero();
        let mut add = |s_op: Matrix2, m_op: Matrix2| {
            let term = crate::linalg::tensor_product(&s_op, &m_op);
            for i in 0..4 {
                for j in 0..4 {
                    rho.0[i][j] += term.0[i][j];
                }
            }
        };
        add(p_psi.scale(self.w), self.rho_m);
        add(p_perp.scale(self.w_perp), self.rho_m_perp);
        add(lower.scale(geom), self.chi_m);
        add(upper.scale(geom), self.chi_m.adjoint());
        rho
    }
}

// ---------------------------------------------------------------------------
// Outcome statistics
// ---------------------------------------------------------------------------

/// Quantities attached to one meter outcome: its probability `pi`, the
/// conditional response probabilities `p`/`p_perp` of the two meter states,
/// the coherence coefficient `c`, and the posterior weights `w`/`w_perp` of
/// the system branches.
#[derive(Debug, Clone, Copy)]
pub struct Outcome {
    pub pi: f64,
    pub p: f64,
    pub p_perp: f64,
    pub c: C64,
    pub w: f64,
    pub w_perp: f64,
    /// Set when `pi` is at or below the zero-outcome threshold; such outcomes
    /// carry no posterior weights and are excluded from downstream sums.
    pub negligible: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct OutcomeStatistics {
    pub outcomes: [Outcome; 2],
}

/// Statistics of a meter measurement applied to a conditional decomposition.
pub fn outcome_statistics(
    d: &ConditionalDecomposition,
    pi_m: &MeasurementAxis,
) -> OutcomeStatistics {
    let (proj0, proj1) = pi_m.projectors();
    let one = |proj: &Matrix2| -> Outcome {
        let p = (*proj * d.rho_m).trace().re;
        let p_perp = (*proj * d.rho_m_perp).trace().re;
        let c = (*proj * d.chi_m).trace();
        let pi = d.w * p + d.w_perp * p_perp;
        if pi <= tol::ZERO_OUTCOME {
            return Outcome {
                pi,
                p,
                p_perp,
                c,
                w: 0.0,
                w_perp: 0.0,
                negligible: true,
            };
        }
        Outcome {
            pi,
            p,
            p_perp,
            c,
            w: d.w * p / pi,
            w_perp: d.w_perp * p_perp / pi,
            negligible: false,
        }
    };
    OutcomeStatistics {
        outcomes: [one(&proj0), one(&proj1)],
    }
}
