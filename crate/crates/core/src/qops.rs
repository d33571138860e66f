// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional state and channel algebra.
//!
//! Matrices are dense `nalgebra` complex matrices. Superoperators act on
//! column-stacked vectorizations, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 8;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QopsError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is outside the supported range 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace:.15}, expected 1")]
    TraceNotUnit { trace: f64 },
    #[error("smallest eigenvalue {min_eigenvalue:.3e} is negative")]
    NotPositive { min_eigenvalue: f64 },
    #[error("channel has no Kraus operators")]
    EmptyChannel,
    #[error("Kraus operators are incomplete (deviation {deviation:.3e})")]
    Incomplete { deviation: f64 },
    #[error("negative time step {0}")]
    NegativeTime(f64),
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `|a><b|` on a `dim`-dimensional space.
pub fn ket_bra(dim: usize, a: usize, b: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(a, b)] = c(1.0, 0.0);
    m
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_square(m: &CMatrix) -> Result<usize, QopsError> {
    if m.nrows() != m.ncols() {
        return Err(QopsError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let d = m.nrows();
    if d == 0 || d > MAX_DIM {
        return Err(QopsError::UnsupportedDimension(d));
    }
    Ok(d)
}

fn check_hermitian(m: &CMatrix) -> Result<usize, QopsError> {
    let d = check_square(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL {
        return Err(QopsError::NotHermitian { deviation });
    }
    Ok(d)
}

/// Symmetrized copy, `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// A valid density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self, QopsError> {
        check_hermitian(&matrix)?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(QopsError::TraceNotUnit { trace: trace.re });
        }
        let min_eigenvalue = hermitian_eigenvalues(&matrix)[0];
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(QopsError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self, QopsError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(QopsError::UnsupportedDimension(dim));
        }
        Ok(Self {
            matrix: identity(dim).unscale(dim as f64),
        })
    }

    /// Qubit state `(I + x σx + y σy + z σz)/2`.
    pub fn qubit(x: f64, y: f64, z: f64) -> Result<Self, QopsError> {
        let m = (identity(2) + sigma_x().scale(x) + sigma_y().scale(y) + sigma_z().scale(z))
            .scale(0.5);
        Self::new(m)
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
}

/// Hermitian generator of the unitary flow between events.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Hamiltonian {
    pub fn new(matrix: CMatrix) -> Result<Self, QopsError> {
        check_hermitian(&matrix)?;
        let eig = hermitian_part(&matrix).symmetric_eigen();
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
            matrix,
        })
    }

    pub fn zero(dim: usize) -> Result<Self, QopsError> {
        Self::new(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.eigenvalues.iter().all(|e| *e == 0.0)
    }

    /// `exp(-i H dt)` built from the eigendecomposition.
    pub fn propagator(&self, dt: f64) -> CMatrix {
        let d = self.dim();
        let mut phased = self.eigenvectors.clone();
        for (j, lambda) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * dt);
            for i in 0..d {
                phased[(i, j)] *= phase;
            }
        }
        phased * self.eigenvectors.adjoint()
    }

    /// `X ↦ U X U†` for an arbitrary operator.
    pub fn evolve_operator(&self, x: &CMatrix, dt: f64) -> CMatrix {
        if dt == 0.0 || self.is_zero() {
            return x.clone();
        }
        let u = self.propagator(dt);
        &u * x * u.adjoint()
    }

    /// Superoperator of `X ↦ -i[H, X]`.
    pub fn liouvillian(&self) -> Superoperator {
        let d = self.dim();
        let id = identity(d);
        let left = id.kronecker(&self.matrix);
        let right = self.matrix.transpose().kronecker(&id);
        Superoperator {
            dim: d,
            matrix: (left - right) * c(0.0, -1.0),
        }
    }
}

/// Hermitian measured operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self, QopsError> {
        check_hermitian(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Outcome of a completeness check on a set of Kraus operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    /// Frobenius norm of `Σ C†C − I`.
    pub deviation: f64,
}

impl Completeness {
    pub fn is_complete(&self) -> bool {
        self.deviation <= COMPLETENESS_TOL
    }
}

/// Structural validation plus completeness report for Kraus operators.
pub fn validate_kraus(operators: &[CMatrix]) -> Result<Completeness, QopsError> {
    let first = operators.first().ok_or(QopsError::EmptyChannel)?;
    let d = check_square(first)?;
    let mut sum = CMatrix::zeros(d, d);
    for op in operators {
        if op.nrows() != d || op.ncols() != d {
            return Err(QopsError::DimensionMismatch {
                expected: d,
                found: op.nrows().max(op.ncols()),
            });
        }
        sum += op.adjoint() * op;
    }
    Ok(Completeness {
        deviation: (sum - identity(d)).norm(),
    })
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self, QopsError> {
        let report = validate_kraus(&operators)?;
        if !report.is_complete() {
            return Err(QopsError::Incomplete {
                deviation: report.deviation,
            });
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Result<Self, QopsError> {
        Self::new(vec![identity(dim)])
    }

    /// Single-operator conjugation `ρ ↦ U ρ U†`.
    pub fn unitary(u: CMatrix) -> Result<Self, QopsError> {
        Self::new(vec![u])
    }

    /// Qubit channel `ρ ↦ σz ρ σz`.
    pub fn sigma_z_flip() -> Self {
        Self {
            operators: vec![sigma_z()],
        }
    }

    /// Qubit channel erasing coherences, `ρ ↦ (ρ + σz ρ σz)/2`.
    pub fn complete_dephasing() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            operators: vec![identity(2).scale(s), sigma_z().scale(s)],
        }
    }

    /// Qubit channel `ρ ↦ Tr(ρ) I/2` built from `|a><b|/√2`.
    pub fn depolarizing() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut operators = Vec::with_capacity(4);
        for a in 0..2 {
            for b in 0..2 {
                operators.push(ket_bra(2, a, b).scale(s));
            }
        }
        Self { operators }
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Linear action `X ↦ Σ C X C†` on any operator.
    pub fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for op in &self.operators {
            out += op * x * op.adjoint();
        }
        out
    }

    /// Dual action `A ↦ Σ C† A C`.
    pub fn apply_dual(&self, a: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for op in &self.operators {
            out += op.adjoint() * a * op;
        }
        out
    }

    pub fn superoperator(&self) -> Superoperator {
        let d = self.dim();
        let mut m = CMatrix::zeros(d * d, d * d);
        for op in &self.operators {
            m += op.conjugate().kronecker(op);
        }
        Superoperator { dim: d, matrix: m }
    }
}

/// Linear map on `d×d` operators stored as a `d²×d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self, QopsError> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(QopsError::DimensionMismatch {
                expected: dim * dim,
                found: matrix.nrows(),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: identity(dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// Superoperator of `X ↦ Σ_k L_k X R_k`.
    pub fn from_sandwiches(dim: usize, terms: &[(CMatrix, CMatrix)]) -> Self {
        let mut m = CMatrix::zeros(dim * dim, dim * dim);
        for (l, r) in terms {
            m += r.transpose().kronecker(l);
        }
        Self { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let v = vectorize(x);
        unvectorize(&(&self.matrix * v), self.dim)
    }

    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn power(&self, n: u32) -> Superoperator {
        let mut out = Superoperator::identity(self.dim);
        for _ in 0..n {
            out = out.compose(self);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.scale(s),
        }
    }

    /// Frobenius norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &Superoperator) -> f64 {
        (&self.matrix * &other.matrix - &other.matrix * &self.matrix).norm()
    }

    pub fn sub(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
        }
    }
}

/// Column-stacking vectorization.
pub fn vectorize(x: &CMatrix) -> CMatrix {
    let d = x.nrows();
    CMatrix::from_column_slice(d * d, 1, x.as_slice())
}

pub fn unvectorize(v: &CMatrix, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

pub fn apply_channel(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix, QopsError> {
    if channel.dim() != rho.dim() {
        return Err(QopsError::DimensionMismatch {
            expected: channel.dim(),
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix {
        matrix: channel.apply_operator(rho.matrix()),
    })
}

/// Generator `E − 1` of the event map.
pub fn event_generator(channel: &KrausChannel) -> Superoperator {
    let s = channel.superoperator();
    s.sub(&Superoperator::identity(channel.dim()))
}

pub fn unitary_step(
    h: &Hamiltonian,
    rho: &DensityMatrix,
    dt: f64,
) -> Result<DensityMatrix, QopsError> {
    if dt < 0.0 {
        return Err(QopsError::NegativeTime(dt));
    }
    if h.dim() != rho.dim() {
        return Err(QopsError::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix {
        matrix: h.evolve_operator(rho.matrix(), dt),
    })
}

/// `Tr(ρ A)` for a Hermitian observable.
pub fn expect(rho: &DensityMatrix, a: &Observable) -> Result<f64, QopsError> {
    if rho.dim() != a.dim() {
        return Err(QopsError::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    Ok(trace_product(rho.matrix(), a.matrix()).re)
}

/// `Tr(X A)` without forming the product.
pub fn trace_product(x: &CMatrix, a: &CMatrix) -> Complex64 {
    let d = x.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += x[(i, j)] * a[(j, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn sigma_z_alone_is_complete() {
        assert!(validate_kraus(&[sigma_z()]).unwrap().is_complete());
    }

    #[test]
    fn depolarizing_operators_are_complete() {
        let ch = KrausChannel::depolarizing();
        assert!(validate_kraus(ch.operators()).unwrap().is_complete());
    }

    #[test]
    fn scaled_sigma_z_reports_deviation() {
        let report = validate_kraus(&[sigma_z().scale(0.5)]).unwrap();
        assert!(!report.is_complete());
        let expected = (identity(2).scale(0.25) - identity(2)).norm();
        assert_abs_diff_eq!(report.deviation, expected, epsilon = 1e-14);
        assert!(matches!(
            KrausChannel::new(vec![sigma_z().scale(0.5)]),
            Err(QopsError::Incomplete { .. })
        ));
    }

    #[test]
    fn mixed_dimensions_are_structural_errors() {
        let err = validate_kraus(&[sigma_z(), identity(3)]).unwrap_err();
        assert!(matches!(err, QopsError::DimensionMismatch { .. }));
        assert_eq!(validate_kraus(&[]).unwrap_err(), QopsError::EmptyChannel);
    }

    #[test]
    fn density_matrix_rejects_invalid_input() {
        assert!(matches!(
            DensityMatrix::new(identity(2)),
            Err(QopsError::TraceNotUnit { .. })
        ));
        assert!(matches!(
            DensityMatrix::qubit(0.0, 0.0, 1.5),
            Err(QopsError::NotPositive { .. })
        ));
        let mut m = identity(2).scale(0.5);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(QopsError::NotHermitian { .. })
        ));
        assert!(DensityMatrix::maximally_mixed(9).is_err());
    }

    #[test]
    fn flip_channel_reverses_x_coherence() {
        let x = 0.7;
        let rho = DensityMatrix::qubit(x, 0.0, 0.0).unwrap();
        let out = apply_channel(&KrausChannel::sigma_z_flip(), &rho).unwrap();
        let expected = DensityMatrix::qubit(-x, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!((out.matrix() - expected.matrix()).norm(), 0.0, epsilon = 1e-15);

        let diag = DensityMatrix::qubit(0.0, 0.0, 0.4).unwrap();
        let out = apply_channel(&KrausChannel::sigma_z_flip(), &diag).unwrap();
        assert_abs_diff_eq!((out.matrix() - diag.matrix()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn depolarizing_maps_everything_to_mixed() {
        let rho = DensityMatrix::qubit(0.3, -0.2, 0.5).unwrap();
        let out = apply_channel(&KrausChannel::depolarizing(), &rho).unwrap();
        assert_abs_diff_eq!((out.matrix() - identity(2).scale(0.5)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn generator_of_identity_channel_vanishes() {
        let l = event_generator(&KrausChannel::identity(3).unwrap());
        assert_abs_diff_eq!(l.matrix().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn generator_of_flip_channel() {
        let l = event_generator(&KrausChannel::sigma_z_flip());
        assert_abs_diff_eq!((l.apply(&sigma_x()) + sigma_x().scale(2.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l.apply(&sigma_z()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn unitary_step_examples() {
        let omega = 1.3;
        let h = Hamiltonian::new(sigma_x().scale(omega / 2.0)).unwrap();
        let up = DensityMatrix::qubit(0.0, 0.0, 1.0).unwrap();
        let same = unitary_step(&h, &up, 0.0).unwrap();
        assert_eq!(same, up);
        let flipped = unitary_step(&h, &up, PI / omega).unwrap();
        let down = DensityMatrix::qubit(0.0, 0.0, -1.0).unwrap();
        assert_abs_diff_eq!((flipped.matrix() - down.matrix()).norm(), 0.0, epsilon = 1e-12);

        let wa = 0.8;
        let h = Hamiltonian::new(sigma_z().scale(wa / 2.0)).unwrap();
        let plus = DensityMatrix::qubit(1.0, 0.0, 0.0).unwrap();
        let sx = Observable::new(sigma_x()).unwrap();
        for dt in [0.1, 1.0, 2.5] {
            let r = unitary_step(&h, &plus, dt).unwrap();
            assert_abs_diff_eq!(expect(&r, &sx).unwrap(), (wa * dt).cos(), epsilon = 1e-12);
        }
        assert!(unitary_step(&h, &plus, -1.0).is_err());
    }

    #[test]
    fn expectation_examples() {
        let sz = Observable::new(sigma_z()).unwrap();
        let sx = Observable::new(sigma_x()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(expect(&mixed, &sz).unwrap(), 0.0, epsilon = 1e-15);
        let plus = DensityMatrix::qubit(1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(expect(&plus, &sx).unwrap(), 1.0, epsilon = 1e-15);
        let r = DensityMatrix::qubit(0.0, 0.0, 0.3).unwrap();
        assert_abs_diff_eq!(expect(&r, &sz).unwrap(), 0.3, epsilon = 1e-15);
        let big = Observable::new(identity(3)).unwrap();
        assert!(expect(&r, &big).is_err());
    }

    #[test]
    fn superoperator_matches_kraus_action() {
        let ch = KrausChannel::complete_dephasing();
        let x = CMatrix::from_row_slice(2, 2, &[c(0.1, 0.2), c(0.3, -0.4), c(0.5, 0.6), c(-0.7, 0.8)]);
        let direct = ch.apply_operator(&x);
        let via = ch.superoperator().apply(&x);
        assert_abs_diff_eq!((direct - via).norm(), 0.0, epsilon = 1e-15);
        let sandwich = Superoperator::from_sandwiches(2, &[(sigma_x(), sigma_z())]);
        assert_abs_diff_eq!(
            (sandwich.apply(&x) - sigma_x() * &x * sigma_z()).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn liouvillian_is_commutator() {
        let h = Hamiltonian::new(sigma_x().scale(0.4) + sigma_z().scale(0.1)).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[c(0.1, 0.2), c(0.3, -0.4), c(0.5, 0.6), c(-0.7, 0.8)]);
        let expected = (h.matrix() * &x - &x * h.matrix()) * c(0.0, -1.0);
        assert_abs_diff_eq!((h.liouvillian().apply(&x) - expected).norm(), 0.0, epsilon = 1e-14);
    }
}
