// SPDX-License-Identifier: Apache-2.0

//! Two-time correlations `Tr[ρ(0) O(t) A(t+τ) Õ(t)]` and the regression
//! comparison against prepared expectation values.

use num_complex::Complex64;

use super::engine::{run_realizations, Trajectory};
use super::ensemble::{check_realizations, OperatorRun};
use super::oracle::{oracle_grid, semi_analytic_state, window_counts, OracleSettings};
use super::{check_age, Model, Preparation, TrajectoryError};
use crate::numerics::TimeGrid;
use crate::qops::{trace_product, CMatrix, DensityMatrix, Observable};
use crate::renewal::CountingTables;

/// Mixes the seed of the expectation run used by [`regression_check`].
const EXPECTATION_SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;

/// Largest deviation tolerated where both curves carry no sampling error.
const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CorrelationSpec {
    pub initial: DensityMatrix,
    pub age: f64,
    pub grid: TimeGrid,
    pub realizations: usize,
    pub seed: u64,
}

/// Complex correlation estimate on a `τ` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    pub grid: TimeGrid,
    pub age: f64,
    pub values: Vec<Complex64>,
    pub stderr_re: Vec<f64>,
    pub stderr_im: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
}

impl CorrelationCurve {
    /// Standard error of the modulus of the estimate's deviation.
    pub fn stderr(&self, k: usize) -> f64 {
        self.stderr_re[k].hypot(self.stderr_im[k])
    }
}

fn check_all(model: &Model, ops: &[Option<&Observable>]) -> Result<(), TrajectoryError> {
    model.require_commuting()?;
    for op in ops.iter().flatten() {
        model.check_operator(op.matrix())?;
    }
    Ok(())
}

/// Monte Carlo estimate of `Tr[ρ(0) O(t) A(t+τ) Õ(t)]`.
///
/// Each realization contributes `Tr{ρ_r(t) O A_r(τ) Õ}`, with `ρ_r(t)` its
/// state at the age and `A_r(τ) = e^{τL_S^#}(E^#)^m[A]` for the `m` events
/// it sees in the window.
pub fn correlate(
    model: &Model,
    o: &Observable,
    a: &Observable,
    spec: &CorrelationSpec,
    sandwich: Option<&Observable>,
) -> Result<CorrelationCurve, TrajectoryError> {
    check_all(model, &[Some(o), Some(a), sandwich])?;
    check_realizations(spec.realizations)?;
    check_age(spec.age)?;
    model.check_operator(spec.initial.matrix())?;
    let frame = model.frame();
    let o_f = frame.enter(o.matrix());
    let a_f = frame.enter(a.matrix());
    let s_f = sandwich.map(|s| frame.enter(s.matrix()));
    let count = spec.grid.count();
    let moments = run_realizations(spec.realizations, spec.seed, 2 * count, |rng, out| {
        let mut traj = Trajectory::new(model, spec.initial.matrix(), rng);
        traj.advance(spec.age, rng);
        let left = traj.frame_state() * &o_f;
        let before = traj.events();
        let mut duals = vec![a_f.clone()];
        for k in 0..count {
            let tau = spec.grid.time(k);
            traj.advance(spec.age + tau, rng);
            let m = traj.events() - before;
            while duals.len() <= m {
                let next = frame.event_dual(duals.last().expect("nonempty"));
                duals.push(next);
            }
            let mut rotated = duals[m].clone();
            frame.flow(&mut rotated, tau, true);
            let v = match &s_f {
                None => trace_product(&left, &rotated),
                Some(s) => trace_product(&left, &(rotated * s)),
            };
            out[k] = v.re;
            out[count + k] = v.im;
        }
    });
    let mean = moments.mean();
    let err = moments.stderr();
    Ok(CorrelationCurve {
        grid: spec.grid,
        age: spec.age,
        values: (0..count).map(|k| Complex64::new(mean[k], mean[count + k])).collect(),
        stderr_re: err[..count].to_vec(),
        stderr_im: err[count..].to_vec(),
        realizations: spec.realizations,
        seed: spec.seed,
    })
}

fn is_stationary(model: &Model, rho0: &CMatrix) -> bool {
    let fixed = (model.channel().apply_operator(rho0) - rho0).norm();
    let h = model.hamiltonian().matrix();
    let flow = (h * rho0 - rho0 * h).norm();
    fixed < EXACT_TOL && flow < EXACT_TOL
}

/// Correlation from event-count probabilities:
/// `Σ_{m,n} P(τ,m;t,n) Tr{e^{tL_S}E^n[ρ₀] O e^{τL_S^#}(E^#)^m[A] Õ}`.
///
/// When `ρ₀` is invariant under both the flow and the channel the sum over
/// `n` collapses onto the window marginal.
#[allow(clippy::too_many_arguments)]
pub fn correlation_semi_analytic(
    model: &Model,
    rho0: &DensityMatrix,
    o: &Observable,
    a: &Observable,
    sandwich: Option<&Observable>,
    age: f64,
    taus: &TimeGrid,
    settings: &OracleSettings,
) -> Result<Vec<Complex64>, TrajectoryError> {
    check_all(model, &[Some(o), Some(a), sandwich])?;
    check_age(age)?;
    model.check_operator(rho0.matrix())?;
    let h = model.hamiltonian();
    let channel = model.channel();
    let dual_at = |duals: &mut Vec<CMatrix>, m: usize, tau: f64| {
        while duals.len() <= m {
            let next = channel.apply_dual(duals.last().expect("nonempty"));
            duals.push(next);
        }
        let rotated = h.evolve_operator(&duals[m], -tau);
        match sandwich {
            None => rotated,
            Some(s) => rotated * s.matrix(),
        }
    };
    let mut duals = vec![a.matrix().clone()];
    if is_stationary(model, rho0.matrix()) {
        let left = rho0.matrix() * o.matrix();
        let weights = window_counts(model.waiting(), age, taus, settings)?;
        return Ok(taus
            .times()
            .zip(&weights)
            .map(|(tau, p)| {
                let total: f64 = p.iter().sum();
                p.iter()
                    .enumerate()
                    .map(|(m, q)| trace_product(&left, &dual_at(&mut duals, m, tau)) * *q)
                    .sum::<Complex64>()
                    / total
            })
            .collect());
    }
    let grid = oracle_grid(settings.step, age + taus.span())?;
    let counting = CountingTables::new(model.waiting().as_ref(), grid, settings.n_max)?;
    let mut states = vec![rho0.matrix().clone()];
    while states.len() <= counting.order() {
        let next = channel.apply_operator(states.last().expect("nonempty"));
        states.push(next);
    }
    let lefts: Vec<CMatrix> = states
        .iter()
        .map(|s| h.evolve_operator(s, age) * o.matrix())
        .collect();
    taus.times()
        .map(|tau| {
            let p = counting.two_time(tau, age)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, row) in p.probabilities.iter().enumerate() {
                let right = dual_at(&mut duals, m, tau);
                for (n, q) in row.iter().enumerate() {
                    acc += trace_product(&lefts[n], &right) * *q;
                }
            }
            Ok(acc / p.total)
        })
        .collect()
}

/// Normalized correlation and expectation decays at one `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionPoint {
    pub tau: f64,
    pub correlation: Complex64,
    pub expectation: Complex64,
    /// Combined standard error of the two normalized estimates.
    pub stderr: f64,
}

impl RegressionPoint {
    pub fn deviation(&self) -> f64 {
        (self.correlation - self.expectation).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionReport {
    pub age: f64,
    pub points: Vec<RegressionPoint>,
    /// Tolerance in combined standard errors.
    pub gate: f64,
}

impl RegressionReport {
    pub fn passed(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.deviation() <= self.gate * p.stderr + EXACT_TOL)
    }

    /// Largest deviation in units of the combined standard error.
    pub fn max_score(&self) -> f64 {
        self.points
            .iter()
            .filter(|p| p.stderr > 0.0)
            .map(|p| p.deviation() / p.stderr)
            .fold(0.0, f64::max)
    }
}

/// Compares `C(τ,t)/C(0,t)` with `Ā(τ)/Ā(0)`, where `Ā` follows the
/// operator `ρ(t)·O` placed at the age `t` with the event clock running.
///
/// `ρ(t)` comes from the counting oracle, so the age must be a multiple of
/// the oracle step. The expectation run uses an independent seed.
pub fn regression_check(
    model: &Model,
    o: &Observable,
    a: &Observable,
    spec: &CorrelationSpec,
    settings: &OracleSettings,
) -> Result<RegressionReport, TrajectoryError> {
    let corr = correlate(model, o, a, spec, None)?;
    let rho_t = semi_analytic_state(model, &spec.initial, &Preparation::None, 0.0, spec.age, settings)?;
    let prepared = rho_t.matrix() * o.matrix();
    let count = spec.grid.count();
    let moments = OperatorRun {
        model,
        initial: spec.initial.matrix(),
        prepared: Some(&prepared),
        age: spec.age,
        grid: &spec.grid,
        observables: std::slice::from_ref(a.matrix()),
        complex: true,
        realizations: spec.realizations,
        seed: spec.seed ^ EXPECTATION_SEED_MIX,
    }
    .run();
    let mean = moments.mean();
    let err = moments.stderr();
    let expect: Vec<Complex64> = (0..count).map(|k| Complex64::new(mean[k], mean[count + k])).collect();
    let (c0, e0) = (corr.values[0], expect[0]);
    if c0.norm() == 0.0 || e0.norm() == 0.0 {
        return Err(TrajectoryError::InvalidArgument(
            "correlation vanishes at τ = 0; the decays cannot be normalized".into(),
        ));
    }
    let points = (0..count)
        .map(|k| {
            let sc = corr.stderr(k) / c0.norm();
            let se = err[k].hypot(err[count + k]) / e0.norm();
            RegressionPoint {
                tau: spec.grid.time(k),
                correlation: corr.values[k] / c0,
                expectation: expect[k] / e0,
                stderr: sc.hypot(se),
            }
        })
        .collect();
    Ok(RegressionReport {
        age: spec.age,
        points,
        gate: 3.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{identity, sigma_x, sigma_z, Hamiltonian, KrausChannel};
    use crate::renewal::{BiExponential, Exponential, WaitingTime};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn dephasing(w: Arc<dyn WaitingTime>, h: f64) -> Model {
        Model::new(
            Hamiltonian::new(sigma_z().scale(h)).unwrap(),
            KrausChannel::sigma_z_flip(),
            w,
        )
        .unwrap()
    }

    fn spec(age: f64, n: usize) -> CorrelationSpec {
        CorrelationSpec {
            initial: DensityMatrix::maximally_mixed(2).unwrap(),
            age,
            grid: TimeGrid::with_span(0.5, 3.0).unwrap(),
            realizations: n,
            seed: 9,
        }
    }

    #[test]
    fn markov_correlation_is_parity() {
        let w: Arc<dyn WaitingTime> = Arc::new(Exponential::new(0.5).unwrap());
        let m = dephasing(w, 0.0);
        let sx = Observable::new(sigma_x()).unwrap();
        let c = correlate(&m, &sx, &sx, &spec(2.0, 20_000), None).unwrap();
        for k in 0..c.grid.count() {
            let exact = (-c.grid.time(k)).exp();
            assert!((c.values[k].re - exact).abs() <= 4.0 * c.stderr(k) + 1e-12);
            assert_eq!(c.values[k].im, 0.0);
        }
    }

    #[test]
    fn identity_left_gives_expectation() {
        let w: Arc<dyn WaitingTime> = Arc::new(BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap());
        let m = dephasing(w, 0.0);
        let id = Observable::new(identity(2)).unwrap();
        let sz = Observable::new(sigma_z()).unwrap();
        let c = correlate(&m, &id, &sz, &spec(1.0, 500), None).unwrap();
        assert!(c.values.iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn semi_analytic_routes_agree() {
        let w: Arc<dyn WaitingTime> = Arc::new(BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap());
        let m = dephasing(w, 0.3);
        let sx = Observable::new(sigma_x()).unwrap();
        let taus = TimeGrid::with_span(0.5, 2.0).unwrap();
        let settings = OracleSettings { step: 0.02, n_max: Some(24) };
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let fast = correlation_semi_analytic(&m, &mixed, &sx, &sx, None, 2.0, &taus, &settings).unwrap();
        // a tiny coherence forces the two-time route while leaving the value unchanged
        let tilted = DensityMatrix::qubit(1e-9, 0.0, 0.0).unwrap();
        let full = correlation_semi_analytic(&m, &tilted, &sx, &sx, None, 2.0, &taus, &settings).unwrap();
        for (a, b) in fast.iter().zip(&full) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-5);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-5);
        }
    }

    #[test]
    fn regression_holds_for_markov_dephasing() {
        let w: Arc<dyn WaitingTime> = Arc::new(Exponential::new(1.0).unwrap());
        let m = dephasing(w, 0.0);
        let sx = Observable::new(sigma_x()).unwrap();
        let settings = OracleSettings { step: 0.05, n_max: None };
        let report = regression_check(&m, &sx, &sx, &spec(1.0, 4000), &settings).unwrap();
        assert!(report.passed(), "max score {}", report.max_score());
    }
}
