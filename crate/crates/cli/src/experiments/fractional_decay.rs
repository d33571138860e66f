// SPDX-License-Identifier: Apache-2.0

use renewal_core::renewal::{aged_survival_asymptotic, AgedRenewalTables, MittagLeffler};

use super::{age_column, Experiment, Report, RunError, Table};
use crate::config::{schema, Age, ConfigError, Setup};

/// Aged survival of the fractional waiting time with its long-time form.
pub struct FractionalDecay;

fn params(setup: &Setup) -> Option<MittagLeffler> {
    setup.waiting.as_any().downcast_ref::<MittagLeffler>().copied()
}

impl Experiment for FractionalDecay {
    fn name(&self) -> &'static str {
        "fractional-decay"
    }

    fn description(&self) -> &'static str {
        "aged survival of the Mittag-Leffler waiting time next to its power-law asymptote"
    }

    fn figure(&self) -> &'static str {
        "non-stationary coherence decay for fractional intervals"
    }

    fn check(&self, setup: &Setup) -> Result<(), ConfigError> {
        setup.require_ages()?;
        setup.reject_unused(&["model", "ensemble", "perturbation"])?;
        let ml = params(setup).ok_or_else(|| schema("fractional-decay needs the `mittag-leffler` waiting time"))?;
        if ml.alpha >= 1.0 {
            return Err(schema("fractional-decay needs alpha < 1"));
        }
        if setup.config.ages.iter().any(|a| matches!(a, Age::Infinite(_))) {
            return Err(schema("fractional intervals have no fully aged limit; drop `inf` from ages"));
        }
        Ok(())
    }

    fn run(&self, setup: &Setup) -> Result<Report, RunError> {
        let ml = params(setup).expect("checked");
        let grid = setup.grid;
        let ages = setup.finite_ages();
        let tables = AgedRenewalTables::new(setup.waiting.clone(), grid, &ages)?;
        let taus: Vec<f64> = grid.times().collect();
        let mut header = vec!["tau".to_string()];
        let mut columns = vec![taus.clone()];
        for &t in &ages {
            header.push(age_column("Ptilde", t));
            columns.push(tables.curves(t)?.survival().samples().to_vec());
        }
        for &t in &ages {
            header.push(age_column("asymptotic", t));
            columns.push(
                taus.iter()
                    .map(|&tau| aged_survival_asymptotic(ml.alpha, ml.amplitude, tau, t))
                    .collect(),
            );
        }
        Ok(Report::table(Table::from_columns(header, &columns)))
    }
}
