// SPDX-License-Identifier: Apache-2.0

use renewal_core::trajectories::{regression_check, CorrelationSpec, OracleSettings, RegressionPoint};

use super::{age_column, Experiment, Report, RunError, Table};
use crate::config::{schema, Age, ConfigError, Setup};

/// Normalized two-time correlation against the normalized expectation of
/// the prepared operator, at each age.
pub struct Regression;

impl Experiment for Regression {
    fn name(&self) -> &'static str {
        "regression"
    }

    fn description(&self) -> &'static str {
        "Monte Carlo test that correlations decay like expectations (needs model.operator)"
    }

    fn figure(&self) -> &'static str {
        "normalized correlation and expectation decays with their standard errors"
    }

    fn check(&self, setup: &Setup) -> Result<(), ConfigError> {
        setup.require_ages()?;
        setup.ensemble()?;
        setup.reject_unused(&["perturbation"])?;
        if setup.config.ages.iter().any(|a| matches!(a, Age::Infinite(_))) {
            return Err(schema("regression ages must be finite"));
        }
        let built = setup.model_spec()?.build(setup.waiting.clone())?;
        if built.operator.is_none() {
            return Err(schema("regression needs model.operator"));
        }
        if built.model.require_commuting().is_err() {
            return Err(schema("regression needs a free flow that commutes with the event map"));
        }
        Ok(())
    }

    fn run(&self, setup: &Setup) -> Result<Report, RunError> {
        let built = setup.model_spec()?.build(setup.waiting.clone())?;
        let o = built.operator.expect("checked");
        let ens = setup.ensemble()?;
        let grid = setup.grid;
        let mut header = vec!["tau".to_string()];
        let mut columns = vec![grid.times().collect::<Vec<_>>()];
        let mut passed = true;
        let mut notes = Vec::new();
        for t in setup.finite_ages() {
            let spec = CorrelationSpec {
                initial: built.initial.clone(),
                age: t,
                grid,
                realizations: ens.realizations,
                seed: ens.seed,
            };
            let report = regression_check(&built.model, &o, &built.observable, &spec, &OracleSettings::default())?;
            passed &= report.passed();
            notes.push(format!(
                "t = {t}: largest deviation {:.2} stderr (gate {})",
                report.max_score(),
                report.gate
            ));
            let parts: [(&str, fn(&RegressionPoint) -> f64); 5] = [
                ("corr_re", |p| p.correlation.re),
                ("corr_im", |p| p.correlation.im),
                ("expect_re", |p| p.expectation.re),
                ("expect_im", |p| p.expectation.im),
                ("stderr", |p| p.stderr),
            ];
            for (name, part) in parts {
                header.push(age_column(name, t));
                columns.push(report.points.iter().map(part).collect());
            }
        }
        Ok(Report {
            table: Table::from_columns(header, &columns),
            passed: Some(passed),
            notes,
        })
    }
}
