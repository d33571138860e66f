// SPDX-License-Identifier: Apache-2.0

use renewal_core::qops::{sigma_x, DensityMatrix, Hamiltonian, KrausChannel, Observable};
use renewal_core::renewal::{survival_on_grid, AgedRenewalTables};
use renewal_core::trajectories::{simulate_ensemble, EnsembleSpec, Model, Preparation};

use super::{age_column, Experiment, Report, RunError, Table};
use crate::config::{schema, Age, ConfigError, Setup};

/// Coherence decay `P̃₀(τ,t)` at several ages, optionally against a
/// dephasing ensemble prepared at each age.
pub struct AgedDecay;

impl Experiment for AgedDecay {
    fn name(&self) -> &'static str {
        "aged-decay"
    }

    fn description(&self) -> &'static str {
        "aged survival P̃₀(τ,t) for each listed age, `inf` for the fully aged limit"
    }

    fn figure(&self) -> &'static str {
        "coherence decay against τ for several preparation ages"
    }

    fn check(&self, setup: &Setup) -> Result<(), ConfigError> {
        setup.require_ages()?;
        setup.reject_unused(&["model", "perturbation"])?;
        let wants_limit = setup.config.ages.iter().any(|a| matches!(a, Age::Infinite(_)));
        if wants_limit && setup.waiting.mean().is_none() {
            return Err(schema(format!(
                "the `{}` waiting time has no finite mean, so the age `inf` has no stationary limit",
                setup.waiting.name()
            )));
        }
        Ok(())
    }

    fn run(&self, setup: &Setup) -> Result<Report, RunError> {
        let grid = setup.grid;
        let finite = setup.finite_ages();
        let tables = AgedRenewalTables::new(setup.waiting.clone(), grid, &finite)?;
        let mut header = vec!["tau".to_string()];
        let mut columns = vec![grid.times().collect::<Vec<_>>()];
        for age in &setup.config.ages {
            header.push(age_column("Ptilde", age));
            columns.push(match age {
                Age::Finite(t) => tables.curves(*t)?.survival().samples().to_vec(),
                Age::Infinite(_) => {
                    let mean = setup.waiting.mean().expect("checked");
                    let tail = survival_on_grid(setup.waiting.as_ref(), grid)?.cumulative_integral();
                    tail.iter().map(|s| (mean - s) / mean).collect()
                }
            });
        }
        if let Some(ens) = setup.config.ensemble {
            let model = Model::new(
                Hamiltonian::zero(2)?,
                KrausChannel::complete_dephasing(),
                setup.waiting.clone(),
            )?;
            let plus = DensityMatrix::qubit(1.0, 0.0, 0.0)?;
            let sx = vec![("S_X".to_string(), Observable::new(sigma_x())?)];
            for &t in &finite {
                let spec = EnsembleSpec {
                    initial: plus.clone(),
                    preparation: Preparation::at_age(plus.clone()),
                    age: t,
                    grid,
                    realizations: ens.realizations,
                    seed: ens.seed,
                };
                let result = simulate_ensemble(&model, &spec, &sx)?;
                header.push(age_column("mc", t));
                columns.push(result.means[0].clone());
                header.push(age_column("stderr", t));
                columns.push(result.stderr[0].clone());
            }
        }
        Ok(Report::table(Table::from_columns(header, &columns)))
    }
}
