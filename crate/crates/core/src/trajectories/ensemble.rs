// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Write};

use super::engine::{run_realizations, Moments, Trajectory};
use super::{check_age, Model, Preparation, TrajectoryError};
use crate::numerics::TimeGrid;
use crate::qops::{trace_product, CMatrix, DensityMatrix, Observable};

/// Below this many realizations a warning about unreliable errors is logged.
const FEW_REALIZATIONS: usize = 30;

/// Inputs of one ensemble run; observables are recorded at `age + τ` for
/// every `τ` on `grid`.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub initial: DensityMatrix,
    pub preparation: Preparation,
    pub age: f64,
    pub grid: TimeGrid,
    pub realizations: usize,
    pub seed: u64,
}

/// Ensemble means and standard errors, one row per observable.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub grid: TimeGrid,
    pub age: f64,
    pub names: Vec<String>,
    pub means: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub realizations: usize,
    pub seed: u64,
}

impl EnsembleResult {
    fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mean(&self, name: &str) -> Option<&[f64]> {
        self.position(name).map(|i| self.means[i].as_slice())
    }

    pub fn stderr_of(&self, name: &str) -> Option<&[f64]> {
        self.position(name).map(|i| self.stderr[i].as_slice())
    }

    /// Columns `tau, mean[..]…, stderr[..]…`.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        let mut header = vec!["tau".to_string()];
        header.extend(self.names.iter().map(|n| format!("mean[{n}]")));
        header.extend(self.names.iter().map(|n| format!("stderr[{n}]")));
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.grid.count() {
            let mut row = vec![format_float(self.grid.time(k))];
            row.extend(self.means.iter().map(|m| format_float(m[k])));
            row.extend(self.stderr.iter().map(|s| format_float(s[k])));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Run over arbitrary operators: `prepared`, when given, replaces the
/// state at `age` in the laboratory frame.
pub(crate) struct OperatorRun<'a> {
    pub model: &'a Model,
    pub initial: &'a CMatrix,
    pub prepared: Option<&'a CMatrix>,
    pub age: f64,
    pub grid: &'a TimeGrid,
    pub observables: &'a [CMatrix],
    pub complex: bool,
    pub realizations: usize,
    pub seed: u64,
}

impl OperatorRun<'_> {
    /// Sample layout: real parts `[obs][τ]`, then imaginary parts when
    /// `complex`.
    pub(crate) fn run(&self) -> Moments {
        let count = self.grid.count();
        let nobs = self.observables.len();
        let width = nobs * count * if self.complex { 2 } else { 1 };
        run_realizations(self.realizations, self.seed, width, |rng, out| {
            let mut traj = Trajectory::new(self.model, self.initial, rng);
            traj.advance(self.age, rng);
            if let Some(x) = self.prepared {
                traj.replace_state(x);
            }
            let frame = self.model.frame();
            let obs: Vec<CMatrix> = self.observables.iter().map(|a| frame.enter(a)).collect();
            for k in 0..count {
                traj.advance(self.age + self.grid.time(k), rng);
                for (j, a) in obs.iter().enumerate() {
                    let v = trace_product(traj.frame_state(), a);
                    out[j * count + k] = v.re;
                    if self.complex {
                        out[(nobs + j) * count + k] = v.im;
                    }
                }
            }
        })
    }
}

pub(crate) fn check_realizations(n: usize) -> Result<(), TrajectoryError> {
    if n == 0 {
        return Err(TrajectoryError::InvalidArgument("at least one realization is required".into()));
    }
    if n < FEW_REALIZATIONS {
        log::warn!("{n} realizations give unreliable standard errors");
    }
    Ok(())
}

/// Monte Carlo average of the observables over renewal-event trajectories.
pub fn simulate_ensemble(
    model: &Model,
    spec: &EnsembleSpec,
    observables: &[(String, Observable)],
) -> Result<EnsembleResult, TrajectoryError> {
    check_realizations(spec.realizations)?;
    check_age(spec.age)?;
    model.check_operator(spec.initial.matrix())?;
    for (_, a) in observables {
        model.check_operator(a.matrix())?;
    }
    let prepared = match &spec.preparation {
        Preparation::None => None,
        Preparation::AtAge { target } => {
            model.check_operator(target.matrix())?;
            Some(model.hamiltonian().evolve_operator(target.matrix(), spec.age))
        }
    };
    let ops: Vec<CMatrix> = observables.iter().map(|(_, a)| a.matrix().clone()).collect();
    let moments = OperatorRun {
        model,
        initial: spec.initial.matrix(),
        prepared: prepared.as_ref(),
        age: spec.age,
        grid: &spec.grid,
        observables: &ops,
        complex: false,
        realizations: spec.realizations,
        seed: spec.seed,
    }
    .run();
    let count = spec.grid.count();
    let errors = moments.stderr();
    let rows = |v: &[f64]| v.chunks(count).map(<[f64]>::to_vec).collect::<Vec<_>>();
    Ok(EnsembleResult {
        grid: spec.grid,
        age: spec.age,
        names: observables.iter().map(|(n, _)| n.clone()).collect(),
        means: rows(moments.mean()),
        stderr: rows(&errors),
        realizations: spec.realizations,
        seed: spec.seed,
    })
}
