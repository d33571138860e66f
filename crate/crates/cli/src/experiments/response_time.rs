// SPDX-License-Identifier: Apache-2.0

use renewal_core::qops::{sigma_z, DensityMatrix, Hamiltonian, KrausChannel, Observable};
use renewal_core::response::{
    perturbed_survival, population_shift_operator, response_event_time, EventPerturbation, EventTimeRoute,
};
use renewal_core::trajectories::Model;

use super::{Experiment, Report, RunError, Table};
use crate::config::{ConfigError, Setup};

/// First-order `⟨σ_z⟩` of the classical two-level system whose event
/// times are shifted by the drive.
pub struct ResponseTime;

impl Experiment for ResponseTime {
    fn name(&self) -> &'static str {
        "response-time"
    }

    fn description(&self) -> &'static str {
        "first-order ⟨σ_z⟩ of a two-level system whose event times follow the drive"
    }

    fn figure(&self) -> &'static str {
        "event-time response curve with its aged-waiting integral"
    }

    fn check(&self, setup: &Setup) -> Result<(), ConfigError> {
        setup.perturbation()?;
        setup.reject_unused(&["model", "ages", "ensemble"])
    }

    fn run(&self, setup: &Setup) -> Result<Report, RunError> {
        let p = setup.perturbation()?;
        let grid = setup.grid;
        let model = Model::new(Hamiltonian::zero(2)?, KrausChannel::depolarizing(), setup.waiting.clone())?;
        let pert = EventPerturbation::event_time(p.lambda, p.drive(), population_shift_operator())?;
        let route = if p.experimental {
            EventTimeRoute::Experimental
        } else {
            EventTimeRoute::SpecialCase
        };
        let r = response_event_time(
            &model,
            &pert,
            &Observable::new(sigma_z())?,
            &DensityMatrix::maximally_mixed(2)?,
            grid,
            route,
        )?;
        let survival: Vec<f64> = grid
            .times()
            .map(|tau| perturbed_survival(setup.waiting.as_ref(), p.lambda, 1.0, p.drive(), tau, 0.0))
            .collect();
        let header = ["tau", "A_bar", "integral", "survival_perturbed"].map(String::from).to_vec();
        let columns = [grid.times().collect(), r.values, r.integral, survival];
        Ok(Report::table(Table::from_columns(header, &columns)))
    }
}
