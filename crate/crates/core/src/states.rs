//! Two-qubit density matrices and local operations.
//!
//! Basis convention, fixed crate-wide: product basis |VV>, |VH>, |HV>, |HH>
//! with the system qubit S first and |V> the +1 eigenvector of sigma_z.
//! Index arithmetic is `2*s + m`.

use crate::linalg::{
    apply2, c, cr, dot_sigma, hermitian_eigen2, hermitian_eigen4, partial_trace, pauli,
    tensor_product, Matrix2, Matrix3, Matrix4, Subsystem, C64,
};
use crate::tol;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("bad probability vector: {0}")]
    BadProbabilities(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("filtered state has vanishing trace")]
    ZeroProbability,
}

// ---------------------------------------------------------------------------
// Bell basis
// ---------------------------------------------------------------------------

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// |Psi-> = (|VH> - |HV>)/sqrt(2)
pub fn psi_minus() -> [C64; 4] {
    [cr(0.0), cr(INV_SQRT2), cr(-INV_SQRT2), cr(0.0)]
}

/// |Phi-> = (|VV> - |HH>)/sqrt(2)
pub fn phi_minus() -> [C64; 4] {
    [cr(INV_SQRT2), cr(0.0), cr(0.0), cr(-INV_SQRT2)]
}

/// |Psi+> = (|VH> + |HV>)/sqrt(2)
pub fn psi_plus() -> [C64; 4] {
    [cr(0.0), cr(INV_SQRT2), cr(INV_SQRT2), cr(0.0)]
}

/// |Phi+> = (|VV> + |HH>)/sqrt(2)
pub fn phi_plus() -> [C64; 4] {
    [cr(INV_SQRT2), cr(0.0), cr(0.0), cr(INV_SQRT2)]
}

/// The four Bell kets in mixture-weight order: Psi-, Phi-, Psi+, Phi+.
pub fn bell_basis() -> [[C64; 4]; 4] {
    [psi_minus(), phi_minus(), psi_plus(), phi_plus()]
}

// ---------------------------------------------------------------------------
// TwoQubitState
// ---------------------------------------------------------------------------

/// A validated two-qubit density matrix: Hermitian, unit trace, positive
/// semidefinite (all up to the crate tolerances). Eigenvalues in the window
/// `[-1e-10, 0)` are clamped to zero with trace renormalization at
/// construction; anything more negative is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RhoJson", into = "RhoJson")]
pub struct TwoQubitState {
    rho: Matrix4,
}

#[derive(Serialize, Deserialize)]
struct RhoJson {
    re: [[f64; 4]; 4],
    im: [[f64; 4]; 4],
}

impl From<TwoQubitState> for RhoJson {
    fn from(s: TwoQubitState) -> Self {
        let mut re = [[0.0; 4]; 4];
        let mut im = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                re[i][j] = s.rho.0[i][j].re;
                im[i][j] = s.rho.0[i][j].im;
            }
        }
        RhoJson { re, im }
    }
}

impl TryFrom<RhoJson> for TwoQubitState {
    type Error = StateError;
    fn try_from(j: RhoJson) -> Result<Self, StateError> {
        let mut rho = Matrix4::zero();
        for i in 0..4 {
            for j2 in 0..4 {
                rho.0[i][j2] = c(j.re[i][j2], j.im[i][j2]);
            }
        }
        TwoQubitState::new(rho)
    }
}

impl TwoQubitState {
    /// Validate `rho` as a density matrix.
    pub fn new(rho: Matrix4) -> Result<Self, StateError> {
        if !rho.is_finite() {
            return Err(StateError::NotDensityMatrix("non-finite entries".into()));
        }
        let defect = rho.hermitian_defect();
        if defect > tol::HERMITICITY {
            return Err(StateError::NotDensityMatrix(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > tol::UNIT_TRACE || trace.im.abs() > tol::UNIT_TRACE {
            return Err(StateError::NotDensityMatrix(format!(
                "trace {} + {}i != 1",
                trace.re, trace.im
            )));
        }
        let eig = hermitian_eigen4(&rho)
            .map_err(|e| StateError::NotDensityMatrix(e.to_string()))?;
        if eig.values[3] < -tol::EIGENVALUE_CLAMP {
            return Err(StateError::NotDensityMatrix(format!(
                "negative eigenvalue {:.3e}",
                eig.values[3]
            )));
        }
        if eig.values[3] >= 0.0 {
            // Store symmetrized to absorb sub-tolerance asymmetry.
            let a = rho.adjoint();
            let mut sym = Matrix4::zero();
            for i in 0..4 {
                for j in 0..4 {
                    sym.0[i][j] = 0.5 * (rho.0[i][j] + a.0[i][j]);
                }
            }
            return Ok(TwoQubitState { rho: sym });
        }
        // Clamp the rounding-level negative tail and renormalize.
        let mut rebuilt = Matrix4::zero();
        let mut total = 0.0;
        for k in 0..4 {
            let lam = eig.values[k].max(0.0);
            total += lam;
            let mut col = [cr(0.0); 4];
            for r in 0..4 {
                col[r] = eig.vectors.0[r][k];
            }
            let proj = Matrix4::outer(&col, &col);
            for i in 0..4 {
                for j in 0..4 {
                    rebuilt.0[i][j] += lam * proj.0[i][j];
                }
            }
        }
        Ok(TwoQubitState {
            rho: rebuilt.scale(1.0 / total),
        })
    }

    pub fn rho(&self) -> &Matrix4 {
        &self.rho
    }

    /// Density matrix of a pure two-qubit ket (normalized on the way in).
    pub fn from_ket(psi: &[C64; 4]) -> Result<Self, StateError> {
        let nrm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            return Err(StateError::BadParameter("zero ket".into()));
        }
        let psi = [psi[0] / nrm, psi[1] / nrm, psi[2] / nrm, psi[3] / nrm];
        TwoQubitState::new(Matrix4::outer(&psi, &psi))
    }

    /// Reduced state of one qubit.
    pub fn marginal(&self, keep: Subsystem) -> Matrix2 {
        match keep {
            Subsystem::S => partial_trace(&self.rho, Subsystem::M),
            Subsystem::M => partial_trace(&self.rho, Subsystem::S),
        }
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// Partial transpose on the meter qubit.
    pub fn partial_transpose(&self) -> Matrix4 {
        let mut out = Matrix4::zero();
        for s in 0..2 {
            for sp in 0..2 {
                for m in 0..2 {
                    for mp in 0..2 {
                        out.0[2 * s + m][2 * sp + mp] = self.rho.0[2 * s + mp][2 * sp + m];
                    }
                }
            }
        }
        out
    }

    /// Entanglement test for two qubits: a negative partial-transpose
    /// eigenvalue is necessary and sufficient.
    pub fn is_entangled(&self) -> bool {
        let eig = hermitian_eigen4(&self.partial_transpose())
            .expect("partial transpose of a Hermitian matrix is Hermitian");
        eig.values[3] < -1e-10
    }

    /// Bloch vectors and correlation matrix of the Pauli expansion
    /// `rho = (1⊗1 + n.sigma⊗1 + 1⊗m.sigma + sum t_kl sigma_k⊗sigma_l)/4`.
    pub fn bloch(&self) -> BlochForm {
        let mut n = [0.0; 3];
        let mut m = [0.0; 3];
        let mut t = Matrix3::zero();
        let id = Matrix2::identity();
        for k in 0..3 {
            n[k] = (self.rho * tensor_product(&pauli(k), &id)).trace().re;
            m[k] = (self.rho * tensor_product(&id, &pauli(k))).trace().re;
            for l in 0..3 {
                t.0[k][l] = (self.rho * tensor_product(&pauli(k), &pauli(l))).trace().re;
            }
        }
        BlochForm { n, m, t }
    }

    /// Conjugate by a product of local unitaries; the correlation matrix
    /// transforms as `T -> O_S T O_M^T` with `O` the SO(3) images.
    pub fn apply_local_unitary(
        &self,
        u_s: &Matrix2,
        u_m: &Matrix2,
    ) -> Result<TwoQubitState, StateError> {
        for u in [u_s, u_m] {
            let dev = (*u * u.adjoint()).max_abs_diff(&Matrix2::identity());
            if dev > tol::HERMITICITY {
                return Err(StateError::NotUnitary { deviation: dev });
            }
        }
        let big = tensor_product(u_s, u_m);
        TwoQubitState::new(big * self.rho * big.adjoint())
    }

    /// Apply local filters and renormalize; returns the post-selected state
    /// and the success probability (the pre-normalization trace).
    pub fn apply_local_filter(
        &self,
        f_s: &LocalFilter,
        f_m: &LocalFilter,
    ) -> Result<(TwoQubitState, f64), StateError> {
        let big = tensor_product(&f_s.f, &f_m.f);
        let sigma = big * self.rho * big.adjoint();
        let p = sigma.trace().re;
        if p < tol::ZERO_TRACE {
            return Err(StateError::ZeroProbability);
        }
        Ok((TwoQubitState::new(sigma.scale(1.0 / p))?, p))
    }

    /// Serialize as a JSON object `{re: [[..];4], im: [[..];4]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serialization cannot fail")
    }

    /// Parse and validate a state from the JSON wire format.
    pub fn from_json(text: &str) -> Result<Self, StateError> {
        serde_json::from_str(text)
            .map_err(|e| StateError::NotDensityMatrix(format!("JSON parse error: {e}")))
    }
}

// ---------------------------------------------------------------------------
// BlochForm
// ---------------------------------------------------------------------------

/// Local Bloch vectors `n` (system), `m` (meter) and the 3x3 correlation
/// matrix `t` with entries `t_kl = Tr[rho sigma_k ⊗ sigma_l]`.
#[derive(Debug, Clone, Copy)]
pub struct BlochForm {
    pub n: [f64; 3],
    pub m: [f64; 3],
    pub t: Matrix3,
}

impl BlochForm {
    /// Rebuild the density matrix from the Pauli expansion; fails when the
    /// triple does not describe a physical state.
    pub fn compose(&self) -> Result<TwoQubitState, StateError> {
        let id = Matrix2::identity();
        let mut rho = Matrix4::identity();
        let add = |rho: &mut Matrix4, m: Matrix4, w: f64| {
            for i in 0..4 {
                for j in 0..4 {
                    rho.0[i][j] += w * m.0[i][j];
                }
            }
        };
        add(&mut rho, tensor_product(&dot_sigma(&self.n), &id), 1.0);
        add(&mut rho, tensor_product(&id, &dot_sigma(&self.m)), 1.0);
        for k in 0..3 {
            for l in 0..3 {
                add(
                    &mut rho,
                    tensor_product(&pauli(k), &pauli(l)),
                    self.t.0[k][l],
                );
            }
        }
        TwoQubitState::new(rho.scale(0.25))
    }
}

// ---------------------------------------------------------------------------
// Named state families
// ---------------------------------------------------------------------------

/// Bell mixture `p1 |Psi-><Psi-| + p2 |Phi-><Phi-| + p3 |Psi+><Psi+| + p4 |Phi+><Phi+|`.
pub fn bell_mixture(p: &[f64; 4]) -> Result<TwoQubitState, StateError> {
    if p.iter().any(|&w| !(0.0..=1.0 + 1e-12).contains(&w)) {
        return Err(StateError::BadProbabilities(format!(
            "weights must lie in [0,1]: {p:?}"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(StateError::BadProbabilities(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    let mut rho = Matrix4::zero();
    for (w, ket) in p.iter().zip(bell_basis()) {
        let proj = Matrix4::outer(&ket, &ket);
        for i in 0..4 {
            for j in 0..4 {
                rho.0[i][j] += *w * proj.0[i][j];
            }
        }
    }
    TwoQubitState::new(rho)
}

/// Two-parameter depolarized family: the Bell mixture with weights
/// `(1±R1)(1±R2)/4`, reducing to the singlet at `R1 = R2 = 1`.
pub fn depolarized_state(r1: f64, r2: f64) -> Result<TwoQubitState, StateError> {
    for (name, r) in [("R1", r1), ("R2", r2)] {
        if !(0.0..=1.0).contains(&r) {
            return Err(StateError::BadParameter(format!("{name} = {r} not in [0,1]")));
        }
    }
    let p = [
        (1.0 + r1) * (1.0 + r2) / 4.0,
        (1.0 - r1) * (1.0 + r2) / 4.0,
        (1.0 + r1) * (1.0 - r2) / 4.0,
        (1.0 - r1) * (1.0 - r2) / 4.0,
    ];
    bell_mixture(&p)
}

/// Werner state `R |Psi-><Psi-| + (1-R)/4 1⊗1`.
pub fn werner(r: f64) -> Result<TwoQubitState, StateError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(StateError::BadParameter(format!("R = {r} not in [0,1]")));
    }
    let ket = psi_minus();
    let proj = Matrix4::outer(&ket, &ket);
    let mut rho = Matrix4::zero();
    for i in 0..4 {
        for j in 0..4 {
            rho.0[i][j] = r * proj.0[i][j];
        }
        rho.0[i][i] += cr((1.0 - r) / 4.0);
    }
    TwoQubitState::new(rho)
}

/// Schmidt-parametrized pure state `sqrt(1-λ)|VH> - sqrt(λ)|HV>`; the singlet
/// at λ = 1/2, a product state at λ ∈ {0, 1}.
pub fn pure_schmidt(lambda: f64) -> Result<TwoQubitState, StateError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(StateError::BadParameter(format!(
            "schmidt weight {lambda} not in [0,1]"
        )));
    }
    let ket = [
        cr(0.0),
        cr((1.0 - lambda).sqrt()),
        cr(-lambda.sqrt()),
        cr(0.0),
    ];
    TwoQubitState::from_ket(&ket)
}

/// Ginibre-induced random state of the given rank: `G G† / Tr(G G†)` with `G`
/// a 4 x rank matrix of independent standard complex Gaussians.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> TwoQubitState {
    assert!((1..=4).contains(&rank), "rank must be in 1..=4, got {rank}");
    let mut g = [[cr(0.0); 4]; 4];
    for row in g.iter_mut() {
        for col in row.iter_mut().take(rank) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *col = c(re, im);
        }
    }
    let mut rho = Matrix4::zero();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = cr(0.0);
            for k in 0..rank {
                s += g[i][k] * g[j][k].conj();
            }
            rho.0[i][j] = s;
        }
    }
    let tr = rho.trace().re;
    TwoQubitState::new(rho.scale(1.0 / tr)).expect("Ginibre construction yields a valid state")
}

// ---------------------------------------------------------------------------
// Local filters
// ---------------------------------------------------------------------------

/// A local (trace-decreasing) filter operator with `f†f <= 1`, so that the
/// pre-normalization trace of a filtered state is a probability.
#[derive(Debug, Clone, Copy)]
pub struct LocalFilter {
    f: Matrix2,
}

impl LocalFilter {
    /// Wrap an operator, checking the contraction bound `f†f <= 1`.
    pub fn new(f: Matrix2) -> Result<Self, StateError> {
        if !f.is_finite() {
            return Err(StateError::BadParameter("non-finite filter".into()));
        }
        let eig = hermitian_eigen2(&(f.adjoint() * f))
            .expect("f†f is Hermitian by construction");
        if eig.values[0] > 1.0 + tol::HERMITICITY {
            return Err(StateError::BadParameter(format!(
                "filter violates f†f <= 1 (largest eigenvalue {})",
                eig.values[0]
            )));
        }
        Ok(LocalFilter { f })
    }

    /// Rescale an arbitrary nonzero operator to maximum singular value 1 and
    /// wrap it as a filter.
    pub fn rescaled(f: Matrix2) -> Result<Self, StateError> {
        let eig = hermitian_eigen2(&(f.adjoint() * f))
            .map_err(|e| StateError::BadParameter(e.to_string()))?;
        let top = eig.values[0].max(0.0).sqrt();
        if top < 1e-154 {
            return Err(StateError::BadParameter("zero filter".into()));
        }
        Ok(LocalFilter {
            f: f.scale(1.0 / top),
        })
    }

    pub fn identity() -> Self {
        LocalFilter {
            f: Matrix2::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.f
    }
}

// ---------------------------------------------------------------------------
// Miscellaneous helpers
// ---------------------------------------------------------------------------

/// `<psi|rho|psi>` for a two-qubit ket.
pub fn expectation(rho: &Matrix4, psi: &[C64; 4]) -> f64 {
    let mut acc = cr(0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i].conj() * rho.0[i][j] * psi[j];
        }
    }
    acc.re
}

/// Fidelity `<psi|rho|psi>` of a state with a pure reference ket.
pub fn fidelity_with_ket(s: &TwoQubitState, psi: &[C64; 4]) -> f64 {
    expectation(s.rho(), psi)
}

/// Bell-basis diagonal weights `<Bell_i|rho|Bell_i>` in mixture order
/// (Psi-, Phi-, Psi+, Phi+).
pub fn bell_weights(s: &TwoQubitState) -> [f64; 4] {
    let basis = bell_basis();
    [
        expectation(s.rho(), &basis[0]),
        expectation(s.rho(), &basis[1]),
        expectation(s.rho(), &basis[2]),
        expectation(s.rho(), &basis[3]),
    ]
}

/// Apply a single-qubit operator to one factor of a two-qubit ket.
pub fn apply_one_sided(op: &Matrix2, side: Subsystem, psi: &[C64; 4]) -> [C64; 4] {
    let mut out = [cr(0.0); 4];
    match side {
        Subsystem::S => {
            for m in 0..2 {
                let v = [psi[m], psi[2 + m]];
                let w = apply2(op, &v);
                out[m] = w[0];
                out[2 + m] = w[1];
            }
        }
        Subsystem::M => {
            for s in 0..2 {
                let v = [psi[2 * s], psi[2 * s + 1]];
                let w = apply2(op, &v);
                out[2 * s] = w[0];
                out[2 * s + 1] = w[1];
            }
        }
    }
    out
}
