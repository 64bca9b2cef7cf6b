//! Fixed-size dense linear algebra: complex 2x2 and 4x4 matrices, real 3x3
//! matrices and 3-vectors.
//!
//! Every object in the two-qubit problem lives at one of these sizes, so all
//! storage is stack arrays and all solvers are closed-form or Jacobi sweeps.
//! There is deliberately no general-N code path.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub type C64 = Complex64;

/// Shorthand complex constructor.
pub const fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// Real number as a complex value.
pub const fn cr(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {asymmetry:.3e}")]
    NonHermitian { asymmetry: f64 },
}

// ---------------------------------------------------------------------------
// 3-vectors
// ---------------------------------------------------------------------------

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn scale3(a: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Unit vector along `a`, or `None` when `|a|` is numerically zero.
pub fn normalize3(a: &[f64; 3]) -> Option<[f64; 3]> {
    let n = norm3(a);
    if n < 1e-300 {
        None
    } else {
        Some(scale3(a, 1.0 / n))
    }
}

// ---------------------------------------------------------------------------
// Complex 2x2
// ---------------------------------------------------------------------------

/// Row-major complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[C64; 2]; 2]);

impl Matrix2 {
    pub const fn zero() -> Self {
        Matrix2([[cr(0.0); 2]; 2])
    }

    pub const fn identity() -> Self {
        Matrix2([[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Matrix2([[a, cr(0.0)], [cr(0.0), b]])
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    /// Largest deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `|psi><phi|` outer product of two kets.
    pub fn outer(ket: &[C64; 2], bra_ket: &[C64; 2]) -> Self {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = ket[i] * bra_ket[j].conj();
            }
        }
        out
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self.scale(-1.0)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = cr(0.0);
                for k in 0..2 {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }
}

impl Mul<C64> for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: C64) -> Matrix2 {
        let mut out = self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= rhs;
            }
        }
        out
    }
}

/// Apply a 2x2 matrix to a ket.
pub fn apply2(m: &Matrix2, v: &[C64; 2]) -> [C64; 2] {
    [
        m.0[0][0] * v[0] + m.0[0][1] * v[1],
        m.0[1][0] * v[0] + m.0[1][1] * v[1],
    ]
}

// ---------------------------------------------------------------------------
// Pauli operators
// ---------------------------------------------------------------------------

pub fn sigma_x() -> Matrix2 {
    Matrix2([[cr(0.0), cr(1.0)], [cr(1.0), cr(0.0)]])
}

pub fn sigma_y() -> Matrix2 {
    Matrix2([[cr(0.0), c(0.0, -1.0)], [c(0.0, 1.0), cr(0.0)]])
}

pub fn sigma_z() -> Matrix2 {
    Matrix2([[cr(1.0), cr(0.0)], [cr(0.0), cr(-1.0)]])
}

/// Pauli operator with 0-based index: 0 -> x, 1 -> y, 2 -> z.
pub fn pauli(k: usize) -> Matrix2 {
    match k {
        0 => sigma_x(),
        1 => sigma_y(),
        2 => sigma_z(),
        _ => panic!("pauli index out of range: {k}"),
    }
}

/// `v . sigma` for a real 3-vector.
pub fn dot_sigma(v: &[f64; 3]) -> Matrix2 {
    Matrix2([
        [cr(v[2]), c(v[0], -v[1])],
        [c(v[0], v[1]), cr(-v[2])],
    ])
}

// ---------------------------------------------------------------------------
// Complex 4x4
// ---------------------------------------------------------------------------

/// Row-major complex 4x4 matrix. Basis index convention throughout the crate:
/// `2*s + m` with the system qubit S first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[C64; 4]; 4]);

impl Matrix4 {
    pub const fn zero() -> Self {
        Matrix4([[cr(0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            out.0[i][i] = cr(1.0);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `|psi><phi|` outer product of two 4-component kets.
    pub fn outer(ket: &[C64; 4], bra_ket: &[C64; 4]) -> Self {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = ket[i] * bra_ket[j].conj();
            }
        }
        out
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;
    fn add(self, rhs: Matrix4) -> Matrix4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Matrix4 {
    type Output = Matrix4;
    fn sub(self, rhs: Matrix4) -> Matrix4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;
    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = cr(0.0);
                for k in 0..4 {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Real 3x3
// ---------------------------------------------------------------------------

/// Row-major real 3x3 matrix (correlation matrices and rotations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub const fn zero() -> Self {
        Matrix3([[0.0; 3]; 3])
    }

    pub const fn identity() -> Self {
        Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn from_diag(d: &[f64; 3]) -> Self {
        let mut out = Matrix3::zero();
        for i in 0..3 {
            out.0[i][i] = d[i];
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Matrix3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[j][i];
            }
        }
        out
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }

    /// Matrix-vector product `M v`.
    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = dot3(row, v);
        }
        out
    }

    /// `M^T v`, i.e. the vector of column dot products.
    pub fn apply_transpose(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for j in 0..3 {
            out[j] = self.0[0][j] * v[0] + self.0[1][j] * v[1] + self.0[2][j] * v[2];
        }
        out
    }

    pub fn column(&self, j: usize) -> [f64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn set_column(&mut self, j: usize, v: &[f64; 3]) {
        for i in 0..3 {
            self.0[i][j] = v[i];
        }
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;
    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let mut out = Matrix3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Tensor product and partial trace
// ---------------------------------------------------------------------------

/// Which qubit of the S (system) / M (meter) pair an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    S,
    M,
}

/// Kronecker product with the S factor first: `(a ⊗ b)[2i+k][2j+l] = a[i][j] b[k][l]`.
pub fn tensor_product(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut out = Matrix4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// Trace out the named subsystem, leaving the 2x2 state of the other one.
pub fn partial_trace(rho: &Matrix4, traced_out: Subsystem) -> Matrix2 {
    let mut out = Matrix2::zero();
    match traced_out {
        // Keep S: sum over the meter index m.
        Subsystem::M => {
            for s in 0..2 {
                for sp in 0..2 {
                    let mut acc = cr(0.0);
                    for m in 0..2 {
                        acc += rho.0[2 * s + m][2 * sp + m];
                    }
                    out.0[s][sp] = acc;
                }
            }
        }
        // Keep M: sum over the system index s.
        Subsystem::S => {
            for m in 0..2 {
                for mp in 0..2 {
                    let mut acc = cr(0.0);
                    for s in 0..2 {
                        acc += rho.0[2 * s + m][2 * s + mp];
                    }
                    out.0[m][mp] = acc;
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Hermitian eigenproblems
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian 2x2 matrix. `values` are sorted
/// descending; `vectors` holds the matching orthonormal eigenvectors as
/// columns, so `h = V diag(values) V†`.
#[derive(Debug, Clone, Copy)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: Matrix2,
}

/// Closed-form solve via the Bloch decomposition `h = c0 I + c . sigma`.
pub fn hermitian_eigen2(h: &Matrix2) -> Result<Eigen2, LinalgError> {
    let defect = h.hermitian_defect();
    if defect > crate::tol::HERMITICITY {
        return Err(LinalgError::NonHermitian { asymmetry: defect });
    }
    let h = symmetrize2(h);

    let c0 = 0.5 * (h.0[0][0].re + h.0[1][1].re);
    let c3 = 0.5 * (h.0[0][0].re - h.0[1][1].re);
    let c1 = h.0[0][1].re;
    let c2 = -h.0[0][1].im;
    let r = (c1 * c1 + c2 * c2 + c3 * c3).sqrt();

    if r < 1e-300 {
        // Scalar matrix: any orthonormal basis works.
        return Ok(Eigen2 {
            values: [c0, c0],
            vectors: Matrix2::identity(),
        });
    }

    // Eigenvector of c.sigma for +r, picking the numerically stable branch.
    let plus: [C64; 2] = if c3 >= 0.0 {
        [cr(r + c3), c(c1, c2)]
    } else {
        [c(c1, -c2), cr(r - c3)]
    };
    let nrm = (plus[0].norm_sqr() + plus[1].norm_sqr()).sqrt();
    let plus = [plus[0] / nrm, plus[1] / nrm];
    // Orthogonal partner for -r.
    let minus = [-plus[1].conj(), plus[0].conj()];

    Ok(Eigen2 {
        values: [c0 + r, c0 - r],
        vectors: Matrix2([[plus[0], minus[0]], [plus[1], minus[1]]]),
    })
}

fn symmetrize2(h: &Matrix2) -> Matrix2 {
    let a = h.adjoint();
    let mut out = Matrix2::zero();
    for i in 0..2 {
        for j in 0..2 {
            out.0[i][j] = 0.5 * (h.0[i][j] + a.0[i][j]);
        }
    }
    out
}

fn symmetrize4(h: &Matrix4) -> Matrix4 {
    let a = h.adjoint();
    let mut out = Matrix4::zero();
    for i in 0..4 {
        for j in 0..4 {
            out.0[i][j] = 0.5 * (h.0[i][j] + a.0[i][j]);
        }
    }
    out
}

/// Eigendecomposition of a Hermitian 4x4 matrix, eigenvalues descending and
/// eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone, Copy)]
pub struct Eigen4 {
    pub values: [f64; 4],
    pub vectors: Matrix4,
}

/// Cyclic complex Jacobi sweeps. Quadratically convergent; at 4x4 a handful
/// of sweeps reaches machine precision.
pub fn hermitian_eigen4(h: &Matrix4) -> Result<Eigen4, LinalgError> {
    let defect = h.hermitian_defect();
    if defect > crate::tol::HERMITICITY {
        return Err(LinalgError::NonHermitian { asymmetry: defect });
    }
    let mut a = symmetrize4(h);
    let mut v = Matrix4::identity();

    for _sweep in 0..64 {
        let off: f64 = (0..4)
            .flat_map(|p| ((p + 1)..4).map(move |q| (p, q)))
            .map(|(p, q)| a.0[p][q].norm_sqr())
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                // Phase-factored Givens rotation zeroing a[p][q].
                let phase = C64::from_polar(1.0, apq.arg());
                let theta = 0.5 * (2.0 * apq.norm()).atan2(app - aqq);
                let (s, cth) = theta.sin_cos();

                for r in 0..4 {
                    let arp = a.0[r][p];
                    let arq = a.0[r][q];
                    a.0[r][p] = arp * cth + arq * phase.conj() * s;
                    a.0[r][q] = arq * cth - arp * phase * s;
                }
                for r in 0..4 {
                    let apr = a.0[p][r];
                    let aqr = a.0[q][r];
                    a.0[p][r] = apr * cth + aqr * phase * s;
                    a.0[q][r] = aqr * cth - apr * phase.conj() * s;
                }
                // Clean rounding residue on the rotated pair.
                a.0[p][q] = cr(0.0);
                a.0[q][p] = cr(0.0);
                a.0[p][p] = cr(a.0[p][p].re);
                a.0[q][q] = cr(a.0[q][q].re);

                for r in 0..4 {
                    let vrp = v.0[r][p];
                    let vrq = v.0[r][q];
                    v.0[r][p] = vrp * cth + vrq * phase.conj() * s;
                    v.0[r][q] = vrq * cth - vrp * phase * s;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a.0[j][j].re.partial_cmp(&a.0[i][i].re).unwrap());

    let mut values = [0.0; 4];
    let mut vectors = Matrix4::zero();
    for (slot, &idx) in order.iter().enumerate() {
        values[slot] = a.0[idx][idx].re;
        for r in 0..4 {
            vectors.0[r][slot] = v.0[r][idx];
        }
    }
    Ok(Eigen4 { values, vectors })
}

// ---------------------------------------------------------------------------
// Trace norm
// ---------------------------------------------------------------------------

/// Sum of singular values of a 2x2 complex matrix, computed from the
/// eigenvalues of `a† a`. For Hermitian input this is the sum of absolute
/// eigenvalues.
pub fn trace_norm(a: &Matrix2) -> f64 {
    let g = a.adjoint() * *a;
    let tr = g.trace().re;
    let det = g.det().re.max(0.0);
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc);
    l1.max(0.0).sqrt() + l2.max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// Real symmetric 3x3 eigenproblem and signed SVD
// ---------------------------------------------------------------------------

/// Jacobi eigendecomposition of a symmetric 3x3 matrix: eigenvalues sorted
/// descending, eigenvectors as the columns of the returned matrix.
pub fn sym3_eigen(m: &Matrix3) -> ([f64; 3], Matrix3) {
    let mut a = *m;
    // Symmetrize against caller rounding.
    for i in 0..3 {
        for j in (i + 1)..3 {
            let avg = 0.5 * (a.0[i][j] + a.0[j][i]);
            a.0[i][j] = avg;
            a.0[j][i] = avg;
        }
    }
    let mut v = Matrix3::identity();

    for _sweep in 0..64 {
        let off = a.0[0][1] * a.0[0][1] + a.0[0][2] * a.0[0][2] + a.0[1][2] * a.0[1][2];
        if off < 1e-32 {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..3 {
                let apq = a.0[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * apq).atan2(a.0[p][p] - a.0[q][q]);
                let (s, cth) = theta.sin_cos();
                for r in 0..3 {
                    let arp = a.0[r][p];
                    let arq = a.0[r][q];
                    a.0[r][p] = cth * arp + s * arq;
                    a.0[r][q] = -s * arp + cth * arq;
                }
                for r in 0..3 {
                    let apr = a.0[p][r];
                    let aqr = a.0[q][r];
                    a.0[p][r] = cth * apr + s * aqr;
                    a.0[q][r] = -s * apr + cth * aqr;
                }
                a.0[p][q] = 0.0;
                a.0[q][p] = 0.0;
                for r in 0..3 {
                    let vrp = v.0[r][p];
                    let vrq = v.0[r][q];
                    v.0[r][p] = cth * vrp + s * vrq;
                    v.0[r][q] = -s * vrp + cth * vrq;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a.0[j][j].partial_cmp(&a.0[i][i]).unwrap());
    let mut values = [0.0; 3];
    let mut vectors = Matrix3::zero();
    for (slot, &idx) in order.iter().enumerate() {
        values[slot] = a.0[idx][idx];
        for r in 0..3 {
            vectors.0[r][slot] = v.0[r][idx];
        }
    }
    (values, vectors)
}

/// Signed SVD of a real 3x3 matrix: `t = rot_left * diag * rot_right^T` with
/// both factors proper rotations (det = +1).
///
/// Sign flips required to keep the factors in SO(3) are absorbed into the
/// diagonal, so `diag` entries may be negative; magnitudes are sorted
/// descending and the sign, when forced, lands on the smallest entry.
#[derive(Debug, Clone, Copy)]
pub struct Svd3 {
    pub rot_left: Matrix3,
    pub diag: [f64; 3],
    pub rot_right: Matrix3,
}

pub fn svd3(t: &Matrix3) -> Svd3 {
    let ata = t.transpose() * *t;
    let (w, mut v) = sym3_eigen(&ata);
    let sigma = [w[0].max(0.0).sqrt(), w[1].max(0.0).sqrt(), w[2].max(0.0).sqrt()];

    // Left vectors u_i = T v_i / sigma_i where well-conditioned, completed by
    // orthonormality otherwise.
    let mut u_cols: [Option<[f64; 3]>; 3] = [None, None, None];
    for i in 0..3 {
        if sigma[i] > 1e-12 {
            let col = t.apply(&v.column(i));
            if let Some(unit) = normalize3(&col) {
                u_cols[i] = Some(unit);
            }
        }
    }
    // Gram-Schmidt pass over the computed columns, then fill gaps.
    let mut filled: Vec<[f64; 3]> = Vec::new();
    for col in u_cols.iter_mut() {
        if let Some(c) = col {
            let mut w = *c;
            for prev in &filled {
                let proj = dot3(&w, prev);
                w = sub3(&w, &scale3(prev, proj));
            }
            match normalize3(&w) {
                Some(unit) => {
                    *col = Some(unit);
                    filled.push(unit);
                }
                None => *col = None,
            }
        }
    }
    let mut u = Matrix3::identity();
    let mut basis: Vec<[f64; 3]> = u_cols.iter().flatten().copied().collect();
    for i in 0..3 {
        let col = match u_cols[i] {
            Some(c) => c,
            None => {
                let c = orthonormal_complement(&basis);
                basis.push(c);
                c
            }
        };
        u.set_column(i, &col);
    }

    let mut diag = sigma;
    // Proper rotations: flip the column paired with the smallest singular
    // value and push the sign into the diagonal.
    if v.det() < 0.0 {
        let flipped = scale3(&v.column(2), -1.0);
        v.set_column(2, &flipped);
        diag[2] = -diag[2];
    }
    if u.det() < 0.0 {
        let flipped = scale3(&u.column(2), -1.0);
        u.set_column(2, &flipped);
        diag[2] = -diag[2];
    }

    Svd3 {
        rot_left: u,
        diag,
        rot_right: v,
    }
}

/// A unit vector orthogonal to all of `basis` (which holds 0..=2 orthonormal
/// vectors).
fn orthonormal_complement(basis: &[[f64; 3]]) -> [f64; 3] {
    match basis.len() {
        0 => [1.0, 0.0, 0.0],
        1 => {
            let b = basis[0];
            // Cross with the coordinate axis least aligned with b.
            let axis = if b[0].abs() <= b[1].abs() && b[0].abs() <= b[2].abs() {
                [1.0, 0.0, 0.0]
            } else if b[1].abs() <= b[2].abs() {
                [0.0, 1.0, 0.0]
            } else {
                [0.0, 0.0, 1.0]
            };
            normalize3(&cross3(&b, &axis)).expect("cross of non-parallel unit vectors")
        }
        _ => {
            let c = cross3(&basis[0], &basis[1]);
            normalize3(&c).expect("cross of orthonormal pair")
        }
    }
}

// ---------------------------------------------------------------------------
// SU(2) <-> SO(3)
// ---------------------------------------------------------------------------

/// The rotation induced by a 2x2 unitary on Bloch vectors:
/// `u (v . sigma) u† = (O v) . sigma`, returned entrywise as
/// `O_ij = Re Tr(sigma_i u sigma_j u†) / 2`.
pub fn rotation_of_unitary(u: &Matrix2) -> Matrix3 {
    let udag = u.adjoint();
    let mut o = Matrix3::zero();
    for j in 0..3 {
        let m = *u * pauli(j) * udag;
        for i in 0..3 {
            o.0[i][j] = 0.5 * (pauli(i) * m).trace().re;
        }
    }
    o
}

/// SU(2) element implementing the rotation by `angle` about `axis`:
/// `cos(angle/2) I - i sin(angle/2) (axis . sigma)`.
pub fn su2_from_axis_angle(axis: &[f64; 3], angle: f64) -> Matrix2 {
    let n = normalize3(axis).expect("rotation axis must be nonzero");
    let (s, cth) = (0.5 * angle).sin_cos();
    let mut out = dot_sigma(&n) * c(0.0, -s);
    out.0[0][0] += cr(cth);
    out.0[1][1] += cr(cth);
    out
}

/// Lift a proper rotation to SU(2) via quaternion extraction (Shepperd's
/// method), picking the representative with rotation angle in `[0, pi]`.
pub fn su2_from_rotation(r: &Matrix3) -> Matrix2 {
    let m = &r.0;
    let tr = m[0][0] + m[1][1] + m[2][2];
    let (mut w, mut x, mut y, mut z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (m[2][1] - m[1][2]) / s;
        y = (m[0][2] - m[2][0]) / s;
        z = (m[1][0] - m[0][1]) / s;
    } else if m[0][0] >= m[1][1] && m[0][0] >= m[2][2] {
        let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
        w = (m[2][1] - m[1][2]) / s;
        x = 0.25 * s;
        y = (m[0][1] + m[1][0]) / s;
        z = (m[0][2] + m[2][0]) / s;
    } else if m[1][1] >= m[2][2] {
        let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
        w = (m[0][2] - m[2][0]) / s;
        x = (m[0][1] + m[1][0]) / s;
        y = 0.25 * s;
        z = (m[1][2] + m[2][1]) / s;
    } else {
        let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
        w = (m[1][0] - m[0][1]) / s;
        x = (m[0][2] + m[2][0]) / s;
        y = (m[1][2] + m[2][1]) / s;
        z = 0.25 * s;
    }
    // Normalize and fix the sign so that w >= 0 (angle in [0, pi]).
    let nrm = (w * w + x * x + y * y + z * z).sqrt();
    w /= nrm;
    x /= nrm;
    y /= nrm;
    z /= nrm;
    if w < 0.0 {
        w = -w;
        x = -x;
        y = -y;
        z = -z;
    }
    // u = w I - i (x sigma_x + y sigma_y + z sigma_z)
    Matrix2([
        [c(w, -z), c(-y, -x)],
        [c(y, -x), c(w, z)],
    ])
}
