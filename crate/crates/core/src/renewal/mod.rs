// SPDX-License-Identifier: Apache-2.0

//! Waiting-time distributions and renewal statistics: survival, memory
//! kernel, aged waiting time and survival, sprinkling density and
//! event-count probabilities.

mod aged;
mod counts;
mod waiting;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use aged::{
    aged_survival_asymptotic, aged_survival_series, density_on_grid, sprinkling_on_grid,
    survival_on_grid, AgedCurves, AgedRenewalTables, SERIES_ARGUMENT_LIMIT,
};
pub use counts::{
    aged_count_probs, event_count_probs, two_time_event_probs, CountingTables, EventCounts,
    TwoTimeCounts, DEFAULT_MASS_TOL, MAX_ORDER, TRUNCATION_WARNING,
};
pub use waiting::{
    biexp_asymptotic_weights, kernel_laplace, sample_interval, survival, BiExponential,
    ClosedSprinkling, Exponential, MittagLeffler, Tabulated, WaitingTime, WaitingTimeFactory,
    WaitingTimeRegistry,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenewalError {
    #[error("invalid waiting-time parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown waiting-time variant `{0}`")]
    UnknownVariant(String),
    #[error("expected a {expected} waiting time, got {found}")]
    WrongVariant { expected: &'static str, found: String },
    #[error("(τ = {tau}, t = {age}) is not on the grid")]
    OffGrid { tau: f64, age: f64 },
    #[error("age {0} was not tabulated")]
    AgeNotTabulated(f64),
    #[error("value at (τ = {tau}, t = {age}) is singular")]
    Singular { tau: f64, age: f64 },
    #[error("series diverges: {0}")]
    Divergence(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
