//! Qubit states and the three channel representations: Kraus operators,
//! the χ process matrix in the Pauli basis, and the Choi–Jamiołkowski state.
//!
//! Conventions used everywhere in this crate:
//!
//! * supervectors are row-major, `|A⟩⟩ = [A11, …, A1d, A21, …, Add]ᵀ`, so that
//!   `|A⟩⟩ = (A ⊗ I)|I⟩⟩`;
//! * the Choi state is `τ = (E ⊗ I)|Ω⟩⟨Ω|`: the channel acts on the FIRST
//!   tensor factor and the second factor is the untouched reference. With
//!   this ordering `d·τ = Σ χ_αβ |E_α⟩⟩⟨⟨E_β|` holds literally;
//! * Pauli matrices are unnormalised (`Tr E_α†E_β = 2δ_αβ`).

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hermitian_eigenvalues, hermiticity_error, max_abs_diff, real, tol, CMatrix, C64, I,
    ONE, ZERO,
};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const ERRORS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_index(index: usize) -> Option<Pauli> {
        Pauli::ALL.get(index).copied()
    }

    pub fn label(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.index()]
    }

    pub fn matrix(self) -> CMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        linalg::cmatrix(2, &m)
    }
}

/// The fixed ordered operator basis {I, X, Y, Z} for a single qubit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PauliBasis;

impl PauliBasis {
    pub const DIM: usize = 2;
    pub const LEN: usize = 4;

    pub fn element(&self, alpha: usize) -> CMatrix {
        Pauli::ALL[alpha].matrix()
    }

    pub fn elements(&self) -> [CMatrix; 4] {
        Pauli::ALL.map(Pauli::matrix)
    }

    /// `Tr(E_α† E_β)`; equals `2δ_αβ` for this basis.
    pub fn inner(&self, alpha: usize, beta: usize) -> C64 {
        linalg::trace(&(self.element(alpha).adjoint() * self.element(beta)))
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace to 1e-12 and eigenvalues ≥ −1e-10.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let herm = hermiticity_error(&matrix);
        if herm > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&matrix)[0];
        if min < -tol::PSD_FLOOR {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Accepts matrices carrying accumulated simulation error: PSD violations
    /// up to 1e-8 are tolerated, the Hermitian part is kept and the trace is
    /// renormalised exactly.
    pub fn from_noisy(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let herm = hermiticity_error(&matrix);
        if herm > tol::DEGENERATE_PSD {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let h = (&matrix + matrix.adjoint()).scale(0.5);
        let tr = linalg::trace(&h).re;
        if tr <= 0.0 {
            return Err(Error::InvalidState(format!("non-positive trace {tr}")));
        }
        let h = h.unscale(tr);
        let min = hermitian_eigenvalues(&h)[0];
        if min < -tol::DEGENERATE_PSD {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { matrix: h })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// `ρ = [[1+P_z, P_x − iP_y], [P_x + iP_y, 1 − P_z]] / 2`.
    pub fn from_bloch(px: f64, py: f64, pz: f64) -> Result<Self> {
        let norm = (px * px + py * py + pz * pz).sqrt();
        if norm > 1.0 + tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!(
                "Bloch vector norm {norm} exceeds 1"
            )));
        }
        Ok(Self::from_matrix_unchecked(bloch_matrix(px, py, pz)))
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn from_pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "state norm {norm}, expected 1"
            )));
        }
        Ok(Self::from_matrix_unchecked(psi * psi.adjoint()))
    }

    /// `|k⟩⟨k|` in a `dim`-dimensional space.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Self::from_matrix_unchecked(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(linalg::identity(dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Bloch coordinates `(P_x, P_y, P_z)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::NotQubit(self.dim()));
        }
        let m = &self.matrix;
        Ok([
            2.0 * m[(1, 0)].re,
            2.0 * m[(1, 0)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

pub(crate) fn bloch_matrix(px: f64, py: f64, pz: f64) -> CMatrix {
    linalg::cmatrix(
        2,
        &[
            real((1.0 + pz) / 2.0),
            c(px / 2.0, -py / 2.0),
            c(px / 2.0, py / 2.0),
            real((1.0 - pz) / 2.0),
        ],
    )
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

/// Channel in operator-sum form, `E(ρ) = Σ E_i ρ E_i†` with `Σ E_i†E_i = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::NotComplete(1.0))?;
        let dim = first.nrows();
        for op in &operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.nrows().max(op.ncols()),
                });
            }
        }
        let ch = Self { dim, operators };
        let err = ch.completeness_error();
        if err > tol::ALGEBRAIC {
            return Err(Error::NotComplete(err));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            operators: vec![linalg::identity(dim)],
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Max entry of `|Σ E_i†E_i − I|`.
    pub fn completeness_error(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, e| {
                acc + e.adjoint() * e
            });
        max_abs_diff(&sum, &linalg::identity(self.dim))
    }

    /// Applies the channel to an arbitrary operator (not necessarily a state).
    pub fn apply_operator(&self, a: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, e| {
                acc + e * a * e.adjoint()
            })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }

    pub fn to_chi(&self) -> Result<ChiMatrix> {
        kraus_to_chi(self)
    }
}

/// `Σ_i E_i ρ E_i†`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: rho.dim(),
        });
    }
    let err = ch.completeness_error();
    if err > tol::ALGEBRAIC {
        return Err(Error::NotComplete(err));
    }
    Ok(DensityMatrix::from_matrix_unchecked(
        ch.apply_operator(rho.matrix()),
    ))
}

/// The twelve real parameters of a trace-preserving qubit χ-matrix.
///
/// Index mapping (1-based, as in the displayed 12-parameter matrix):
/// `χ1..χ3` diagonal of the X/Y/Z block, `χ4 + iχ5 = χ_01`,
/// `χ6 + iχ7 = χ_02`, `χ8 + iχ9 = χ_03`, `χ10 = Re χ_12`, `χ11 = Re χ_13`,
/// `χ12 = Re χ_23`. Trace preservation fixes the remaining imaginary parts:
/// `Im χ_12 = −χ8`, `Im χ_13 = χ6`, `Im χ_23 = −χ4`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChiParams {
    values: [f64; 12],
}

impl ChiParams {
    pub fn new(values: [f64; 12]) -> Self {
        Self { values }
    }

    /// 1-based accessor, `get(1) == χ1`.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn values(&self) -> [f64; 12] {
        self.values
    }
}

/// Process matrix of a qubit channel in the Pauli basis,
/// `E(ρ) = Σ χ_αβ E_α ρ E_β†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    matrix: CMatrix,
}

impl ChiMatrix {
    /// Requires a 4×4 matrix that is Hermitian within 1e-12.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.nrows(),
            });
        }
        let herm = hermiticity_error(&matrix);
        if herm > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!(
                "χ not Hermitian (deviation {herm:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_diagonal(diag: [f64; 4]) -> Self {
        let mut m = CMatrix::zeros(4, 4);
        for (k, v) in diag.iter().enumerate() {
            m[(k, k)] = real(*v);
        }
        Self { matrix: m }
    }

    /// Trace-preserving χ built from the 12-parameter form.
    pub fn from_params(p: ChiParams) -> Self {
        let x = |k| p.get(k);
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = real(1.0 - x(1) - x(2) - x(3));
        m[(1, 1)] = real(x(1));
        m[(2, 2)] = real(x(2));
        m[(3, 3)] = real(x(3));
        m[(0, 1)] = c(x(4), x(5));
        m[(0, 2)] = c(x(6), x(7));
        m[(0, 3)] = c(x(8), x(9));
        m[(1, 2)] = c(x(10), -x(8));
        m[(1, 3)] = c(x(11), x(6));
        m[(2, 3)] = c(x(12), -x(4));
        for a in 0..4 {
            for b in 0..a {
                m[(a, b)] = m[(b, a)].conj();
            }
        }
        Self { matrix: m }
    }

    pub fn identity() -> Self {
        Self::from_diagonal([1.0, 0.0, 0.0, 0.0])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn entry(&self, alpha: usize, beta: usize) -> C64 {
        self.matrix[(alpha, beta)]
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.matrix[(k, k)].re)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    worst = worst.max(self.matrix[(a, b)].norm());
                }
            }
        }
        worst
    }

    pub fn is_diagonal(&self, tolerance: f64) -> bool {
        self.max_off_diagonal() <= tolerance
    }

    pub fn params(&self) -> ChiParams {
        let m = &self.matrix;
        ChiParams::new([
            m[(1, 1)].re,
            m[(2, 2)].re,
            m[(3, 3)].re,
            m[(0, 1)].re,
            m[(0, 1)].im,
            m[(0, 2)].re,
            m[(0, 2)].im,
            m[(0, 3)].re,
            m[(0, 3)].im,
            m[(1, 2)].re,
            m[(1, 3)].re,
            m[(2, 3)].re,
        ])
    }

    /// `Σ χ_αβ E_α A E_β†` for an arbitrary 2×2 operator `A`.
    pub fn apply_operator(&self, a: &CMatrix) -> CMatrix {
        let basis = PauliBasis.elements();
        let mut out = CMatrix::zeros(2, 2);
        for (alpha, ea) in basis.iter().enumerate() {
            let left = ea * a;
            for (beta, eb) in basis.iter().enumerate() {
                let coeff = self.matrix[(alpha, beta)];
                if coeff != ZERO {
                    out += (&left * eb.adjoint()) * coeff;
                }
            }
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_chi(self, rho)
    }

    /// Max entry of `|Σ χ_αβ E_β†E_α − I|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let basis = PauliBasis.elements();
        let mut sum = CMatrix::zeros(2, 2);
        for (alpha, ea) in basis.iter().enumerate() {
            for (beta, eb) in basis.iter().enumerate() {
                sum += (eb.adjoint() * ea) * self.matrix[(alpha, beta)];
            }
        }
        max_abs_diff(&sum, &linalg::identity(2))
    }

    /// Residuals of the four scalar trace-preservation relations,
    /// `[χ00 − (1 − χ11 − χ22 − χ33), Im χ12 + Re χ03, Im χ31 + Re χ02, Im χ23 + Re χ01]`.
    pub fn trace_preservation_residuals(&self) -> [f64; 4] {
        let m = &self.matrix;
        [
            m[(0, 0)].re - (1.0 - m[(1, 1)].re - m[(2, 2)].re - m[(3, 3)].re),
            m[(1, 2)].im + m[(3, 0)].re,
            m[(3, 1)].im + m[(2, 0)].re,
            m[(2, 3)].im + m[(1, 0)].re,
        ]
    }

    /// Affine action on Bloch vectors, `P ↦ T P + t`.
    pub fn bloch_affine(&self) -> BlochAffine {
        let basis = PauliBasis.elements();
        let image_of_identity = self.apply_operator(&basis[0]);
        let mut shift = [0.0; 3];
        let mut matrix = [[0.0; 3]; 3];
        for i in 0..3 {
            shift[i] = linalg::trace(&(&basis[i + 1] * &image_of_identity)).re / 2.0;
        }
        for j in 0..3 {
            let image = self.apply_operator(&basis[j + 1]);
            for (i, row) in matrix.iter_mut().enumerate() {
                row[j] = linalg::trace(&(&basis[i + 1] * &image)).re / 2.0;
            }
        }
        BlochAffine { matrix, shift }
    }
}

/// `P ↦ matrix·P + shift` on the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAffine {
    pub matrix: [[f64; 3]; 3],
    pub shift: [f64; 3],
}

impl BlochAffine {
    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let mut out = self.shift;
        for (i, o) in out.iter_mut().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                *o += self.matrix[i][j] * pj;
            }
        }
        out
    }
}

/// `Σ χ_αβ E_α ρ E_β†`.
pub fn apply_chi(chi: &ChiMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_matrix_unchecked(
        chi.apply_operator(rho.matrix()),
    ))
}

/// Expands each Kraus operator in the Pauli basis, `c_iα = Tr(E_α†E_i)/2`,
/// and accumulates `χ_αβ = Σ_i c_iα c*_iβ`.
pub fn kraus_to_chi(ch: &KrausChannel) -> Result<ChiMatrix> {
    if ch.dim() != 2 {
        return Err(Error::NotQubit(ch.dim()));
    }
    let basis = PauliBasis.elements();
    let mut m = CMatrix::zeros(4, 4);
    for op in ch.operators() {
        let coeffs: Vec<C64> = basis
            .iter()
            .map(|e| linalg::trace(&(e.adjoint() * op)) / 2.0)
            .collect();
        for a in 0..4 {
            for b in 0..4 {
                m[(a, b)] += coeffs[a] * coeffs[b].conj();
            }
        }
    }
    ChiMatrix::new(m)
}

/// Row-major vectorisation of a square operator, `|A⟩⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Supervector(DVector<C64>);

impl Supervector {
    pub fn from_operator(a: &CMatrix) -> Self {
        let d = a.nrows();
        Self(DVector::from_fn(d * a.ncols(), |k, _| a[(k / d, k % d)]))
    }

    pub fn to_operator(&self) -> Result<CMatrix> {
        let len = self.0.len();
        let d = (len as f64).sqrt().round() as usize;
        if d * d != len {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: len,
            });
        }
        Ok(CMatrix::from_fn(d, d, |i, j| self.0[i * d + j]))
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<C64> {
        self.0
    }
}

/// `|Ω⟩ = (1/√d) Σ_i |i⟩|i⟩`.
pub fn maximally_entangled(d: usize) -> Result<DVector<C64>> {
    if d < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: d,
        });
    }
    let amp = real(1.0 / (d as f64).sqrt());
    let mut v = DVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    Ok(v)
}

/// Choi–Jamiołkowski state of a channel on a `d`-level system. The first
/// tensor factor is the channel output, the second the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    d: usize,
    matrix: CMatrix,
}

impl ChoiState {
    /// Requires a Hermitian `d² × d²` matrix. Positivity is not enforced so
    /// that images of non-CP maps can still be inspected.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let n = matrix.nrows();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n || d < 2 {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: n,
            });
        }
        let herm = hermiticity_error(&matrix);
        if herm > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!(
                "Choi matrix not Hermitian (deviation {herm:.3e})"
            )));
        }
        Ok(Self { d, matrix })
    }

    /// `(E ⊗ I)|Ω⟩⟨Ω|` evaluated directly from Kraus operators.
    pub fn from_kraus(ch: &KrausChannel) -> Result<Self> {
        let d = ch.dim();
        let omega = maximally_entangled(d)?;
        let projector = &omega * omega.adjoint();
        let id = linalg::identity(d);
        let mut m = CMatrix::zeros(d * d, d * d);
        for e in ch.operators() {
            let lifted = linalg::kron(e, &id);
            m += &lifted * &projector * lifted.adjoint();
        }
        Self::new(m)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues()[0] >= -tol::PSD_FLOOR
    }

    /// Trace over the channel (first) factor; `I/d` for trace-preserving maps.
    pub fn reference_marginal(&self) -> CMatrix {
        let d = self.d;
        CMatrix::from_fn(d, d, |r, s| {
            (0..d).map(|k| self.matrix[(k * d + r, k * d + s)]).sum()
        })
    }

    /// Recovers the channel action, `E(ρ) = d · Tr_ref[τ (I ⊗ ρᵀ)]`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let d = self.d;
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        let r = rho.matrix();
        let out = CMatrix::from_fn(d, d, |i, j| {
            let mut acc = ZERO;
            for a in 0..d {
                for b in 0..d {
                    // ⟨i a| τ |j b⟩ · ρᵀ_{b a}
                    acc += self.matrix[(i * d + a, j * d + b)] * r[(a, b)];
                }
            }
            acc * d as f64
        });
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    pub fn to_chi(&self) -> Result<ChiMatrix> {
        choi_to_chi(self)
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix.clone())
    }
}

/// `τ = (1/d) Σ χ_αβ |E_α⟩⟩⟨⟨E_β|`.
pub fn chi_to_choi(chi: &ChiMatrix) -> ChoiState {
    let vecs: Vec<DVector<C64>> = PauliBasis
        .elements()
        .iter()
        .map(|e| Supervector::from_operator(e).into_vector())
        .collect();
    let mut m = CMatrix::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let coeff = chi.entry(a, b);
            if coeff != ZERO {
                m += (&vecs[a] * vecs[b].adjoint()) * coeff;
            }
        }
    }
    ChoiState {
        d: 2,
        matrix: m.unscale(2.0),
    }
}

/// Dual-basis projection `χ_αβ = ⟨⟨E_α| (d·τ) |E_β⟩⟩ / (‖E_α‖² ‖E_β‖²)`
/// with `‖E‖² = Tr E†E = 2`.
pub fn choi_to_chi(tau: &ChoiState) -> Result<ChiMatrix> {
    if tau.d() != 2 {
        return Err(Error::NotQubit(tau.d()));
    }
    let vecs: Vec<DVector<C64>> = PauliBasis
        .elements()
        .iter()
        .map(|e| Supervector::from_operator(e).into_vector())
        .collect();
    let scaled = tau.matrix().scale(2.0);
    let mut m = CMatrix::zeros(4, 4);
    for a in 0..4 {
        let row = vecs[a].adjoint() * &scaled;
        for b in 0..4 {
            m[(a, b)] = (&row * &vecs[b])[(0, 0)] / 4.0;
        }
    }
    let m = (&m + m.adjoint()).scale(0.5);
    ChiMatrix::new(m)
}

/// Outcome of the CPTP test on a χ-matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub trace_preserving: bool,
    pub completely_positive: bool,
    pub min_eigenvalue: f64,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.trace_preserving && self.completely_positive
    }
}

pub fn verify_cptp(chi: &ChiMatrix) -> CptpReport {
    let min_eigenvalue = hermitian_eigenvalues(chi.matrix())[0];
    CptpReport {
        trace_preserving: chi.trace_preservation_error() <= tol::PSD_FLOOR,
        completely_positive: min_eigenvalue >= -tol::PSD_FLOOR,
        min_eigenvalue,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bit_flip(p: f64) -> KrausChannel {
        KrausChannel::new(vec![
            Pauli::I.matrix().scale((1.0 - p).sqrt()),
            Pauli::X.matrix().scale(p.sqrt()),
        ])
        .unwrap()
    }

    fn amplitude_damping(gamma_t: f64) -> KrausChannel {
        let e = (-gamma_t).exp();
        KrausChannel::new(vec![
            linalg::cmatrix(2, &[ONE, ZERO, ZERO, real(e.sqrt())]),
            linalg::cmatrix(2, &[ZERO, real((1.0 - e).sqrt()), ZERO, ZERO]),
        ])
        .unwrap()
    }

    #[test]
    fn pauli_basis_is_trace_orthogonal() {
        for a in 0..4 {
            let sq = PauliBasis.element(a) * PauliBasis.element(a);
            assert!(max_abs_diff(&sq, &linalg::identity(2)) < 1e-15);
            for b in 0..4 {
                let expected = if a == b { 2.0 } else { 0.0 };
                assert_abs_diff_eq!(PauliBasis.inner(a, b).re, expected);
                assert_abs_diff_eq!(PauliBasis.inner(a, b).im, 0.0);
            }
        }
    }

    #[test]
    fn density_matrix_rejects_bad_input() {
        let not_unit = linalg::identity(2);
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = linalg::cmatrix(2, &[real(1.5), ZERO, ZERO, real(-0.5)]);
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm = linalg::cmatrix(2, &[real(0.5), real(0.1), ZERO, real(0.5)]);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::from_bloch(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn noisy_input_is_renormalised() {
        let m = linalg::cmatrix(2, &[real(1.0 + 1e-9), ZERO, ZERO, real(-1e-9)]);
        let rho = DensityMatrix::from_noisy(m).unwrap();
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bloch_round_trip() {
        let rho = DensityMatrix::from_bloch(0.3, -0.4, 0.5).unwrap();
        let p = rho.bloch_vector().unwrap();
        assert_abs_diff_eq!(p[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn kraus_completeness_enforced() {
        let bad = vec![Pauli::I.matrix(), Pauli::X.matrix().scale(0.1)];
        assert!(matches!(KrausChannel::new(bad), Err(Error::NotComplete(_))));
    }

    #[test]
    fn apply_channel_examples() {
        let rho = DensityMatrix::from_bloch(0.2, 0.1, -0.3).unwrap();
        let same = apply_channel(&bit_flip(0.0), &rho).unwrap();
        assert!(same.max_abs_diff(&rho) < 1e-15);

        let flipped = apply_channel(&bit_flip(1.0), &DensityMatrix::basis_state(2, 0)).unwrap();
        assert!(flipped.max_abs_diff(&DensityMatrix::basis_state(2, 1)) < 1e-15);

        let wrong = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            apply_channel(&bit_flip(0.1), &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_chi_examples() {
        let rho = DensityMatrix::from_bloch(0.1, 0.7, 0.2).unwrap();
        let out = apply_chi(&ChiMatrix::identity(), &rho).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-15);

        let half = ChiMatrix::from_diagonal([0.5, 0.5, 0.0, 0.0]);
        let out = apply_chi(&half, &DensityMatrix::basis_state(2, 0)).unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
    }

    #[test]
    fn amplitude_damping_chi_reproduces_relaxation() {
        let gt = 0.7;
        let chi = kraus_to_chi(&amplitude_damping(gt)).unwrap();
        let rho = DensityMatrix::basis_state(2, 1);
        let out = apply_chi(&chi, &rho).unwrap();
        let e = (-gt).exp();
        assert_abs_diff_eq!(out.matrix()[(1, 1)].re, e, epsilon = 1e-14);
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, 1.0 - e, epsilon = 1e-14);

        let coh = DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap();
        let out = apply_chi(&chi, &coh).unwrap();
        assert_abs_diff_eq!(
            out.matrix()[(0, 1)].re,
            0.5 * (-gt / 2.0).exp(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn kraus_to_chi_examples() {
        let chi = kraus_to_chi(&bit_flip(0.3)).unwrap();
        let expected = ChiMatrix::from_diagonal([0.7, 0.3, 0.0, 0.0]);
        assert!(max_abs_diff(chi.matrix(), expected.matrix()) < 1e-15);

        let chi = kraus_to_chi(&KrausChannel::identity(2)).unwrap();
        assert!(max_abs_diff(chi.matrix(), ChiMatrix::identity().matrix()) < 1e-15);

        let big = KrausChannel::identity(4);
        assert!(matches!(kraus_to_chi(&big), Err(Error::NotQubit(4))));
    }

    #[test]
    fn amplitude_damping_chi_entries() {
        let gt: f64 = 1.3;
        let e = (-gt).exp();
        let g = (-gt / 2.0).exp();
        let chi = kraus_to_chi(&amplitude_damping(gt)).unwrap();
        let m = chi.matrix();
        assert_abs_diff_eq!(m[(0, 0)].re, (1.0 + g).powi(2) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 3)].re, (1.0 - g).powi(2) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 3)].re, (1.0 - e) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 0)].re, (1.0 - e) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)].re, (1.0 - e) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 2)].re, (1.0 - e) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 2)].im, (e - 1.0) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 1)].im, (1.0 - e) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn chi_to_choi_examples() {
        let tau = chi_to_choi(&ChiMatrix::identity());
        let omega = maximally_entangled(2).unwrap();
        assert!(max_abs_diff(tau.matrix(), &(&omega * omega.adjoint())) < 1e-15);

        let p = 0.3;
        let tau = chi_to_choi(&ChiMatrix::from_diagonal([1.0 - p, p, 0.0, 0.0]));
        let ev = tau.eigenvalues();
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[2], p, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[3], 1.0 - p, epsilon = 1e-14);

        let gt: f64 = 1.0;
        let e = (-gt).exp();
        let tau = chi_to_choi(&kraus_to_chi(&amplitude_damping(gt)).unwrap());
        let ev = tau.eigenvalues();
        assert_abs_diff_eq!(ev[2], (1.0 - e) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[3], (1.0 + e) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn choi_to_chi_examples() {
        let omega = maximally_entangled(2).unwrap();
        let tau = ChoiState::new(&omega * omega.adjoint()).unwrap();
        let chi = choi_to_chi(&tau).unwrap();
        assert!(max_abs_diff(chi.matrix(), ChiMatrix::identity().matrix()) < 1e-15);

        let tau = ChoiState::from_kraus(&bit_flip(0.25)).unwrap();
        let chi = choi_to_chi(&tau).unwrap();
        let expected = ChiMatrix::from_diagonal([0.75, 0.25, 0.0, 0.0]);
        assert!(max_abs_diff(chi.matrix(), expected.matrix()) < 1e-15);

        let tau = ChoiState::new(linalg::identity(9).unscale(9.0)).unwrap();
        assert!(matches!(choi_to_chi(&tau), Err(Error::NotQubit(3))));
    }

    #[test]
    fn choi_from_kraus_matches_chi_route() {
        let ch = amplitude_damping(0.4);
        let direct = ChoiState::from_kraus(&ch).unwrap();
        let via_chi = chi_to_choi(&kraus_to_chi(&ch).unwrap());
        assert!(max_abs_diff(direct.matrix(), via_chi.matrix()) < 1e-15);
        let marginal = direct.reference_marginal();
        assert!(max_abs_diff(&marginal, &linalg::identity(2).unscale(2.0)) < 1e-15);
    }

    #[test]
    fn verify_cptp_examples() {
        let r = verify_cptp(&ChiMatrix::from_diagonal([0.5, 0.5, 0.0, 0.0]));
        assert!(r.trace_preserving && r.completely_positive);

        let r = verify_cptp(&ChiMatrix::from_diagonal([-0.2, 1.2, 0.0, 0.0]));
        assert!(r.trace_preserving);
        assert!(!r.completely_positive);
        assert_abs_diff_eq!(r.min_eigenvalue, -0.2, epsilon = 1e-14);

        let p = 0.7;
        let r = verify_cptp(&ChiMatrix::from_diagonal([
            1.0 - 1.5 * p,
            p / 2.0,
            p / 2.0,
            p / 2.0,
        ]));
        assert!(r.trace_preserving);
        assert!(!r.completely_positive);

        let r = verify_cptp(&ChiMatrix::from_diagonal([0.5, 0.0, 0.0, 0.0]));
        assert!(!r.trace_preserving);
    }

    #[test]
    fn maximally_entangled_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let omega = maximally_entangled(2).unwrap();
        let expected = [s, 0.0, 0.0, s];
        for (got, want) in omega.iter().zip(expected) {
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-15);
            assert_abs_diff_eq!(got.im, 0.0);
        }

        let lifted = linalg::kron(&Pauli::X.matrix(), &linalg::identity(2)) * &omega;
        let scaled = lifted.scale(2f64.sqrt());
        let x = Supervector::from_operator(&Pauli::X.matrix());
        for (got, want) in scaled.iter().zip(x.as_vector().iter()) {
            assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(x.as_vector()[1].re, 1.0);
        assert_abs_diff_eq!(x.as_vector()[2].re, 1.0);

        let four = maximally_entangled(4).unwrap();
        assert_abs_diff_eq!(four.norm(), 1.0, epsilon = 1e-15);
        assert_eq!(
            four.iter().filter(|z| (z.re - 0.5).abs() < 1e-15).count(),
            4
        );

        assert!(maximally_entangled(1).is_err());
    }

    #[test]
    fn supervector_round_trip_and_identity() {
        let a = linalg::cmatrix(2, &[c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(4.0, -1.0)]);
        let v = Supervector::from_operator(&a);
        assert_eq!(v.to_operator().unwrap(), a);
        assert_eq!(v.as_vector()[1], a[(0, 1)]);

        let id = Supervector::from_operator(&linalg::identity(2)).into_vector();
        let lifted = linalg::kron(&a, &linalg::identity(2)) * id;
        assert_eq!(&lifted, v.as_vector());
    }

    #[test]
    fn params_round_trip_is_trace_preserving() {
        let p = ChiParams::new([
            0.1, 0.05, 0.02, 0.01, -0.02, 0.03, 0.01, -0.015, 0.004, 0.02, -0.01, 0.005,
        ]);
        let chi = ChiMatrix::from_params(p);
        assert_eq!(chi.params(), p);
        assert!(chi.trace_preservation_error() < 1e-15);
        for r in chi.trace_preservation_residuals() {
            assert!(r.abs() < 1e-15);
        }
    }
}
