// SPDX-License-Identifier: Apache-2.0

//! Renewal-event trajectories of the density matrix, ensemble averages,
//! preparation at a given age, two-time correlations and the event-counting
//! oracle for models whose free flow commutes with the event map.

mod correlation;
mod engine;
mod ensemble;
mod oracle;

use std::sync::Arc;

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::qops::{CMatrix, DensityMatrix, Hamiltonian, KrausChannel, QopsError};
use crate::renewal::{RenewalError, WaitingTime};

pub use correlation::{
    correlate, correlation_semi_analytic, regression_check, CorrelationCurve, CorrelationSpec,
    RegressionPoint, RegressionReport,
};
pub use engine::{realization_rng, run_realizations, Moments, Trajectory, CHUNK_SIZE};
pub use ensemble::{format_float, simulate_ensemble, EnsembleResult, EnsembleSpec};
pub use oracle::{
    dephasing_coherence, dephasing_coherence_curve, parity_decay, semi_analytic_curve,
    semi_analytic_state, window_counts, OracleSettings,
};

use engine::Frame;

/// Largest `‖[L_S, E]‖` accepted as commuting.
pub const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error(transparent)]
    Qops(#[from] QopsError),
    #[error(transparent)]
    Renewal(#[from] RenewalError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("free flow and event map do not commute (commutator norm {0:.3e}); the counting oracle does not apply")]
    NonCommuting(f64),
    #[error("{0}")]
    InvalidArgument(String),
}

/// Unitary flow between events, the event channel and the interval law.
#[derive(Debug, Clone)]
pub struct Model {
    hamiltonian: Hamiltonian,
    channel: KrausChannel,
    waiting: Arc<dyn WaitingTime>,
    frame: Frame,
}

impl Model {
    pub fn new(
        hamiltonian: Hamiltonian,
        channel: KrausChannel,
        waiting: Arc<dyn WaitingTime>,
    ) -> Result<Self, TrajectoryError> {
        if hamiltonian.dim() != channel.dim() {
            return Err(QopsError::DimensionMismatch {
                expected: hamiltonian.dim(),
                found: channel.dim(),
            }
            .into());
        }
        let frame = Frame::new(&hamiltonian, &channel);
        Ok(Self {
            hamiltonian,
            channel,
            waiting,
            frame,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn waiting(&self) -> &Arc<dyn WaitingTime> {
        &self.waiting
    }

    pub(crate) fn frame(&self) -> &Frame {
        &self.frame
    }

    /// `‖[L_S, E]‖` in the Frobenius norm of the superoperator matrices.
    pub fn commutator_norm(&self) -> f64 {
        self.hamiltonian
            .liouvillian()
            .commutator_norm(&self.channel.superoperator())
    }

    /// Fails with [`TrajectoryError::NonCommuting`] unless the flow and
    /// the event map commute.
    pub fn require_commuting(&self) -> Result<(), TrajectoryError> {
        let norm = self.commutator_norm();
        if norm < COMMUTATOR_TOL {
            Ok(())
        } else {
            Err(TrajectoryError::NonCommuting(norm))
        }
    }

    pub(crate) fn check_operator(&self, x: &CMatrix) -> Result<(), TrajectoryError> {
        if x.nrows() != self.dim() || x.ncols() != self.dim() {
            return Err(QopsError::DimensionMismatch {
                expected: self.dim(),
                found: x.nrows(),
            }
            .into());
        }
        Ok(())
    }
}

/// State reset applied at the age `t`.
///
/// The target is given in the interaction picture: the state right after
/// the reset is `exp(t L_S) ρ_Π`. The event clock keeps running, so the
/// time elapsed since the last event before `t` still shapes what follows.
#[derive(Debug, Clone, PartialEq)]
pub enum Preparation {
    None,
    AtAge { target: DensityMatrix },
}

impl Preparation {
    pub fn at_age(target: DensityMatrix) -> Self {
        Self::AtAge { target }
    }

    pub fn target(&self) -> Option<&DensityMatrix> {
        match self {
            Self::None => None,
            Self::AtAge { target } => Some(target),
        }
    }
}

pub(crate) fn check_age(t: f64) -> Result<(), TrajectoryError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(TrajectoryError::InvalidArgument(format!("age must be finite and nonnegative, got {t}")))
    }
}
