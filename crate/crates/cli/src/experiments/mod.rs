// SPDX-License-Identifier: Apache-2.0

//! Named experiments behind `renewal run`.

mod aged_decay;
mod fractional_decay;
mod regression;
mod response_event;
mod response_time;
mod validate;

use std::collections::BTreeMap;

use renewal_core::numerics::NumericsError;
use renewal_core::qops::QopsError;
use renewal_core::renewal::RenewalError;
use renewal_core::response::ResponseError;
use renewal_core::trajectories::{format_float, TrajectoryError};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Setup};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical guard: {0}")]
    Numerical(String),
}

macro_rules! numerical_from {
    ($($t:ty),*) => {
        $(impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::Numerical(e.to_string())
            }
        })*
    };
}

numerical_from!(NumericsError, QopsError, RenewalError, TrajectoryError, ResponseError);

/// Column-oriented CSV table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn from_columns(header: Vec<String>, columns: &[Vec<f64>]) -> Self {
        assert_eq!(header.len(), columns.len());
        let n = columns.first().map_or(0, Vec::len);
        let rows = (0..n)
            .map(|i| columns.iter().map(|c| format_float(c[i])).collect())
            .collect();
        Self { header, rows }
    }

    pub fn write(&self, w: impl std::io::Write) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()
    }
}

/// Result of one experiment.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: Table,
    /// Outcome of the experiment's own pass/fail gate, when it has one.
    pub passed: Option<bool>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn table(table: Table) -> Self {
        Self {
            table,
            ..Self::default()
        }
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// The plot the output reproduces.
    fn figure(&self) -> &'static str;

    /// Experiment-specific config checks, run before any computation.
    fn check(&self, setup: &Setup) -> Result<(), ConfigError>;

    fn run(&self, setup: &Setup) -> Result<Report, RunError>;
}

#[derive(Debug, Clone, Serialize)]
pub struct Listing {
    pub name: &'static str,
    pub description: &'static str,
    pub figure: &'static str,
}

pub struct ExperimentRegistry {
    entries: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(aged_decay::AgedDecay));
        r.register(Box::new(fractional_decay::FractionalDecay));
        r.register(Box::new(regression::Regression));
        r.register(Box::new(response_event::ResponseEvent));
        r.register(Box::new(response_time::ResponseTime));
        r.register(Box::new(validate::Validate));
        r
    }

    pub fn register(&mut self, experiment: Box<dyn Experiment>) {
        self.entries.insert(experiment.name(), experiment);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.entries.get(name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn listing(&self) -> Vec<Listing> {
        self.entries
            .values()
            .map(|e| Listing {
                name: e.name(),
                description: e.description(),
                figure: e.figure(),
            })
            .collect()
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

pub(crate) fn age_column(name: &str, age: impl std::fmt::Display) -> String {
    format!("{name}[t={age}]")
}
