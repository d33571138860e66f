// SPDX-License-Identifier: Apache-2.0

use renewal_core::renewal::survival_on_grid;
use renewal_core::response::{simulate_perturbed_depolarizing, sz_exact_depolarizing, DepolarizingDrive};

use super::{Experiment, Report, RunError, Table};
use crate::config::{ConfigError, Setup};

/// Driven depolarizing qubit: quadrature of `S_Z(τ)` and, with an
/// `ensemble` section, the Monte Carlo mean of the scalar process.
pub struct ResponseEvent;

impl Experiment for ResponseEvent {
    fn name(&self) -> &'static str {
        "response-event"
    }

    fn description(&self) -> &'static str {
        "⟨σ_z⟩ of a driven depolarizing qubit whose event map carries the drive"
    }

    fn figure(&self) -> &'static str {
        "driven S_Z with Monte Carlo points and the ±λP₀(τ) band"
    }

    fn check(&self, setup: &Setup) -> Result<(), ConfigError> {
        setup.perturbation()?;
        setup.reject_unused(&["model", "ages"])
    }

    fn run(&self, setup: &Setup) -> Result<Report, RunError> {
        let p = setup.perturbation()?;
        let grid = setup.grid;
        let drive = p.drive();
        let exact = sz_exact_depolarizing(setup.waiting.as_ref(), p.big_omega, drive, p.lambda, grid)?;
        let mut header = vec!["tau".to_string(), "sz_exact".to_string()];
        let mut columns = vec![grid.times().collect::<Vec<_>>(), exact];
        if let Some(ens) = setup.config.ensemble {
            let params = DepolarizingDrive {
                big_omega: p.big_omega,
                drive,
                lambda: p.lambda,
                initial: p.initial,
            };
            let mc = simulate_perturbed_depolarizing(&setup.waiting, &params, grid, ens.realizations, ens.seed)?;
            header.extend(["sz_mc".to_string(), "stderr".to_string()]);
            columns.push(mc.means[0].clone());
            columns.push(mc.stderr[0].clone());
        }
        let survival = survival_on_grid(setup.waiting.as_ref(), grid)?;
        header.push("envelope".to_string());
        columns.push(survival.samples().iter().map(|s| p.lambda.abs() * s).collect());
        Ok(Report::table(Table::from_columns(header, &columns)))
    }
}
