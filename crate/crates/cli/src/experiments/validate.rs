// SPDX-License-Identifier: Apache-2.0

use renewal_core::numerics::{laplace_numeric, renewal_residual, TailModel};
use renewal_core::renewal::{
    aged_count_probs, density_on_grid, sprinkling_on_grid, survival_on_grid, AgedRenewalTables, CountingTables,
};
use renewal_core::response::{perturbed_density_normalization, Drive};
use renewal_core::trajectories::{format_float, realization_rng};

use super::{Experiment, Report, RunError, Table};
use crate::config::{schema, Age, ConfigError, Setup};

const COUNT_TOL: f64 = 1e-4;
const LAPLACE_TOL: f64 = 1e-4;
const RESIDUAL_TOL: f64 = 1e-5;
const BOUNDS_TOL: f64 = 1e-6;
const SAMPLES: usize = 20_000;
const SAMPLE_SEED: u64 = 1;

/// Invariant suite for one waiting time: count normalization, two-time
/// marginals, renewal residual, Laplace identities, aged-survival bounds,
/// perturbed-density normalization and the interval sampler.
pub struct Validate;

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

impl Experiment for Validate {
    fn name(&self) -> &'static str {
        "validate"
    }

    fn description(&self) -> &'static str {
        "invariant suite for the configured waiting time; exits nonzero on any failure"
    }

    fn figure(&self) -> &'static str {
        "pass/fail table, no plot"
    }

    fn check(&self, setup: &Setup) -> Result<(), ConfigError> {
        setup.require_ages()?;
        setup.reject_unused(&["model", "ensemble", "perturbation"])?;
        let span = setup.grid.span();
        for age in &setup.config.ages {
            match age {
                Age::Infinite(_) => return Err(schema("validate ages must be finite")),
                Age::Finite(t) if *t >= span => {
                    return Err(schema(format!("validate age {t} must be below the grid span {span}")))
                }
                Age::Finite(_) => {}
            }
        }
        Ok(())
    }

    fn run(&self, setup: &Setup) -> Result<Report, RunError> {
        let w = setup.waiting.as_ref();
        let grid = setup.grid;
        let last = grid.count() - 1;
        let mut checks = Vec::new();

        let counting = CountingTables::new(w, grid, None)?;
        let mut worst: f64 = 0.0;
        for k in 0..grid.count() {
            worst = worst.max((counting.at(grid.time(k))?.total - 1.0).abs());
        }
        checks.push(Check::at_most("count normalization", worst, COUNT_TOL));

        let ages = setup.finite_ages();
        let aged = AgedRenewalTables::new(setup.waiting.clone(), grid, &ages)?;
        for &t in &ages {
            let j = grid.index_of(t).expect("checked on grid");
            let tau = grid.time(last - j);
            let two = counting.two_time(tau, t)?;
            checks.push(Check::at_most(
                format!("two-time normalization t={t}"),
                (two.total - 1.0).abs(),
                COUNT_TOL,
            ));
            let single = aged_count_probs(&aged, &counting, tau, t)?;
            let window = two.window_marginal();
            let gap = window
                .iter()
                .zip(&single.probabilities)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            checks.push(Check::at_most(format!("window marginal t={t}"), gap, COUNT_TOL));

            let curve = aged.curves(t)?.survival().samples();
            let mut violation = (curve[0] - 1.0).abs();
            for pair in curve.windows(2) {
                violation = violation.max(pair[1] - pair[0]);
            }
            for &s in curve {
                violation = violation.max(-s).max(s - 1.0);
            }
            checks.push(Check::at_most(format!("aged survival bounds t={t}"), violation.max(0.0), BOUNDS_TOL));

            let norm = perturbed_density_normalization(w, 0.1, 1.0, Drive::Cos { omega: 1.0 }, t, grid)?;
            checks.push(Check::at_most(
                format!("perturbed density normalization t={t}"),
                (norm - 1.0).abs(),
                COUNT_TOL,
            ));
        }

        let density = density_on_grid(w, grid)?;
        let survival = survival_on_grid(w, grid)?;
        let sprinkling = sprinkling_on_grid(w, grid)?;
        checks.push(Check::at_most(
            "renewal residual",
            renewal_residual(&density, &sprinkling)?,
            RESIDUAL_TOL,
        ));

        for u in [0.5, 1.0, 2.0] {
            let p0 = laplace_numeric(&survival, u, TailModel::None)?.value;
            let f = laplace_numeric(&sprinkling, u, TailModel::None)?.value;
            checks.push(Check::at_most(
                format!("K(u)P0(u) = w(u) at u={u}"),
                (w.kernel_laplace(u) * p0 - w.laplace(u)).abs(),
                LAPLACE_TOL,
            ));
            checks.push(Check::at_most(
                format!("P0(u)f(u) = 1/u - P0(u) at u={u}"),
                (p0 * f - (1.0 / u - p0)).abs(),
                LAPLACE_TOL,
            ));
        }

        let probes = [0.25, 0.5, 1.0].map(|q| grid.span() * q / 4.0);
        let mut exceed = [0usize; 3];
        for i in 0..SAMPLES {
            let x = w.sample(&mut realization_rng(SAMPLE_SEED, i as u64));
            for (e, s) in exceed.iter_mut().zip(probes) {
                *e += usize::from(x > s);
            }
        }
        let mut score: f64 = 0.0;
        for (e, s) in exceed.iter().zip(probes) {
            let p = w.survival(s);
            let sd = (p * (1.0 - p) / SAMPLES as f64).sqrt().max(1e-12);
            score = score.max((*e as f64 / SAMPLES as f64 - p).abs() / sd);
        }
        checks.push(Check::at_most("sampler survival (standard errors)", score, 4.0));

        let passed = checks.iter().all(|c| c.passed);
        let notes = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("FAIL {}: {:.3e} > {:.1e}", c.name, c.value, c.tolerance))
            .collect();
        let table = Table {
            header: ["check", "value", "tolerance", "status"].map(String::from).to_vec(),
            rows: checks
                .into_iter()
                .map(|c| {
                    vec![
                        c.name,
                        format_float(c.value),
                        format_float(c.tolerance),
                        if c.passed { "PASS" } else { "FAIL" }.to_string(),
                    ]
                })
                .collect(),
        };
        Ok(Report {
            table,
            passed: Some(passed),
            notes,
        })
    }
}
