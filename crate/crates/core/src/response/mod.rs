// SPDX-License-Identifier: Apache-2.0

//! Linear response to a drive that perturbs either the event map or the
//! times at which events occur.

mod event_time;
mod superop;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::numerics::NumericsError;
use crate::qops::{
    hermitian_part, ket_bra, unvectorize, CMatrix, DensityMatrix, QopsError, Superoperator,
};
use crate::renewal::RenewalError;
use crate::trajectories::{Model, TrajectoryError};

pub use event_time::{
    event_time_integral, perturbed_density, perturbed_density_normalization, perturbed_survival,
    population_shift_operator, response_event_time, unperturbed_survival, EventTimeResponse,
    EventTimeRoute,
};
pub use superop::{
    depolarizing_drive_operator, depolarizing_model, response_kernel_event, simulate_perturbed_depolarizing,
    sz_exact_depolarizing, DepolarizingDrive, ResponseKernel, MIN_POINTS_PER_PERIOD,
};

/// Tolerance of the stationarity and trace checks.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Singular values of `E − 1` below this count as eigenvalue one.
const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResponseError {
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Renewal(#[from] RenewalError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Qops(#[from] QopsError),
    #[error("the channel has eigenvalue one with multiplicity {multiplicity}; the fixed point is not unique")]
    DegenerateFixedPoint { multiplicity: usize },
    #[error("fixed point is not invariant under the free flow (‖[H, ρ]‖ = {deviation:.3e})")]
    NotInvariant { deviation: f64 },
    #[error("initial state differs from the stationary state by {deviation:.3e}")]
    NotStationary { deviation: f64 },
    #[error("grid step {step} resolves a period of {period} with fewer than {MIN_POINTS_PER_PERIOD} points")]
    UnderResolved { step: f64, period: f64 },
    #[error("perturbed survival is negative ({value:.3e}) at τ = {tau}")]
    NegativeSurvival { tau: f64, value: f64 },
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
}

/// Time dependence `ξ(τ)` of the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Cos { omega: f64 },
    Const { value: f64 },
}

impl Drive {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Drive::Cos { omega } => (omega * t).cos(),
            Drive::Const { value } => value,
        }
    }

    /// `∫_a^b ξ`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match *self {
            Drive::Cos { omega: 0.0 } => b - a,
            Drive::Cos { omega } => ((omega * b).sin() - (omega * a).sin()) / omega,
            Drive::Const { value } => value * (b - a),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match *self {
            Drive::Cos { .. } => 1.0,
            Drive::Const { value } => value.abs(),
        }
    }

    /// Angular frequency, zero for a constant drive.
    pub fn frequency(&self) -> f64 {
        match *self {
            Drive::Cos { omega } => omega.abs(),
            Drive::Const { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationKind {
    /// `E(τ) = E + λ ξ(τ) O` with trace-annihilating `O`.
    Superoperator,
    /// Event times shifted by `λ O ∫ξ`.
    EventTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventPerturbation {
    pub kind: PerturbationKind,
    pub lambda: f64,
    pub drive: Drive,
    pub op: Superoperator,
}

impl EventPerturbation {
    /// Requires `Tr O[X] = 0` for every `X` and `λ max|ξ| ≤ 1`.
    pub fn superoperator(lambda: f64, drive: Drive, op: Superoperator) -> Result<Self, ResponseError> {
        let d = op.dim();
        for a in 0..d {
            for b in 0..d {
                let tr = op.apply(&ket_bra(d, a, b)).trace().norm();
                if tr > STATIONARY_TOL {
                    return Err(ResponseError::InvalidPerturbation(format!(
                        "Tr O[|{a}><{b}|] = {tr:.3e}, expected 0"
                    )));
                }
            }
        }
        if lambda.abs() * drive.max_abs() > 1.0 {
            return Err(ResponseError::InvalidPerturbation(format!(
                "λ max|ξ| = {} exceeds 1",
                lambda.abs() * drive.max_abs()
            )));
        }
        Ok(Self {
            kind: PerturbationKind::Superoperator,
            lambda,
            drive,
            op,
        })
    }

    pub fn event_time(lambda: f64, drive: Drive, op: Superoperator) -> Result<Self, ResponseError> {
        if !lambda.is_finite() {
            return Err(ResponseError::InvalidPerturbation(format!("λ = {lambda}")));
        }
        Ok(Self {
            kind: PerturbationKind::EventTime,
            lambda,
            drive,
            op,
        })
    }

    /// Same perturbation with another strength.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }

    fn require(&self, kind: PerturbationKind) -> Result<(), ResponseError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(ResponseError::InvalidPerturbation(format!(
                "expected a {kind:?} perturbation, got {:?}",
                self.kind
            )))
        }
    }
}

/// Unique fixed point of the event map that is also left alone by the
/// free flow.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub rho_inf: DensityMatrix,
}

/// Fixed point of the channel, from the null space of `E − 1`.
///
/// Invariance under the unitary flow is checked as `[H, ρ_∞] = 0`.
pub fn stationary_state(model: &Model) -> Result<StationaryState, ResponseError> {
    let d = model.dim();
    let generator = model.channel().superoperator().sub(&Superoperator::identity(d));
    let svd = generator.matrix().clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let null: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < FIXED_POINT_TOL)
        .map(|(i, _)| i)
        .collect();
    if null.len() != 1 {
        return Err(ResponseError::DegenerateFixedPoint { multiplicity: null.len() });
    }
    let row = v_t.row(null[0]).adjoint();
    let v = DMatrix::from_column_slice(d * d, 1, row.as_slice());
    let mut rho: CMatrix = unvectorize(&v, d);
    let tr = rho.trace();
    rho /= tr;
    let rho = DensityMatrix::new(hermitian_part(&rho))?;
    let h = model.hamiltonian().matrix();
    let deviation = (h * rho.matrix() - rho.matrix() * h).norm();
    if deviation > STATIONARY_TOL {
        return Err(ResponseError::NotInvariant { deviation });
    }
    Ok(StationaryState { rho_inf: rho })
}

pub(crate) fn require_stationary(
    state: &StationaryState,
    initial: &DensityMatrix,
) -> Result<(), ResponseError> {
    let deviation = (state.rho_inf.matrix() - initial.matrix()).norm();
    if deviation > STATIONARY_TOL {
        return Err(ResponseError::NotStationary { deviation });
    }
    Ok(())
}
