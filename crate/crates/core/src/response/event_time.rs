// SPDX-License-Identifier: Apache-2.0

//! Drive shifting the event times: `P₀(τ|t) = P₀[τ + λ O ∫_t^{t+τ} ξ]`
//! expanded to first order in `λ`.

use super::{require_stationary, stationary_state, Drive, EventPerturbation, PerturbationKind, ResponseError};
use crate::numerics::{convolve, GridFunction, TimeGrid};
use crate::qops::{ket_bra, trace_product, DensityMatrix, Observable, Superoperator};
use crate::renewal::{density_on_grid, sprinkling_on_grid, survival_on_grid, CountingTables, WaitingTime};
use crate::trajectories::Model;

/// Relative step of the central difference for `w′(τ)`.
const DIFF_STEP: f64 = 1e-4;

/// `X ↦ −Σ_a a |a⟩⟨a| X |a⟩⟨a|` on a qubit, with `a = +1` for the first
/// basis state.
pub fn population_shift_operator() -> Superoperator {
    let terms = [
        (ket_bra(2, 0, 0).scale(-1.0), ket_bra(2, 0, 0)),
        (ket_bra(2, 1, 1), ket_bra(2, 1, 1)),
    ];
    Superoperator::from_sandwiches(2, &terms)
}

/// `P₀(τ|t) ≈ P₀(τ) − λ o w(τ) ∫_t^{t+τ} ξ` for a shift eigenvalue `o`.
pub fn perturbed_survival(w: &dyn WaitingTime, lambda: f64, shift: f64, drive: Drive, tau: f64, t: f64) -> f64 {
    if tau == 0.0 {
        return 1.0;
    }
    w.survival(tau) - lambda * shift * w.density(tau) * drive.integral(t, t + tau)
}

fn density_slope(w: &dyn WaitingTime, tau: f64) -> f64 {
    let d = DIFF_STEP * tau;
    (w.density(tau + d) - w.density(tau - d)) / (2.0 * d)
}

/// `w(τ|t) ≈ w(τ) + λ o ∂_τ[w(τ) ∫_t^{t+τ} ξ]` on `grid`, keeping the
/// origin behaviour of `w`.
pub fn perturbed_density(
    w: &dyn WaitingTime,
    lambda: f64,
    shift: f64,
    drive: Drive,
    t: f64,
    grid: TimeGrid,
) -> Result<GridFunction, ResponseError> {
    let base = density_on_grid(w, grid)?;
    let c = lambda * shift;
    let mut samples = Vec::with_capacity(grid.count());
    for k in 0..grid.count() {
        let tau = grid.time(k);
        let v = base.value(k);
        samples.push(if k == 0 {
            let exponent = base.singular_exponent().unwrap_or(0.0);
            v * (1.0 + c * (1.0 + exponent) * drive.value(t))
        } else {
            let slope = density_slope(w, tau) * drive.integral(t, t + tau);
            v + c * (slope + v * drive.value(t + tau))
        });
    }
    Ok(GridFunction::with_singularity(grid, samples, base.singular_exponent())?
        .with_fractional_order(w.fractional_order())?)
}

/// `∫₀^T w(τ|t) dτ + P₀(T|t)`, which equals one when the expansion keeps
/// the normalization.
pub fn perturbed_density_normalization(
    w: &dyn WaitingTime,
    lambda: f64,
    shift: f64,
    drive: Drive,
    t: f64,
    grid: TimeGrid,
) -> Result<f64, ResponseError> {
    let density = perturbed_density(w, lambda, shift, drive, t, grid)?;
    Ok(density.integral() + perturbed_survival(w, lambda, shift, drive, grid.span(), t))
}

/// `∫₀^τ w̃(τ−τ′, τ′) ξ(τ′) dτ′`.
///
/// With `w̃(s,a) = w(s+a) + ∫₀^a w(s+a−u) f(u,0) du` and the renewal
/// equation the double integral becomes `Ξ(τ) f(τ,0) − ∫₀^τ w(τ−u) f(u,0) Ξ(u) du`
/// where `Ξ(x) = ∫₀^x ξ`.
pub fn event_time_integral(w: &dyn WaitingTime, drive: Drive, grid: TimeGrid) -> Result<Vec<f64>, ResponseError> {
    let f0 = sprinkling_on_grid(w, grid)?;
    let weighted = f0.multiply(|s| drive.integral(0.0, s))?;
    let conv = convolve(&density_on_grid(w, grid)?, &weighted)?;
    Ok((0..grid.count())
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                drive.integral(0.0, grid.time(k)) * f0.value(k) - conv.value(k)
            }
        })
        .collect())
}

/// Which form of the event-time response to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventTimeRoute {
    /// Only the `w̃` term; requires `E O ρ_∞ ∈ {ρ_∞, 0}`.
    SpecialCase,
    /// Adds the correlation integral term as printed. Its overall sign is
    /// not settled, so results from this route are unvalidated.
    Experimental,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventTimeResponse {
    pub grid: TimeGrid,
    /// `Tr[A ρ_∞]`.
    pub baseline: f64,
    /// `Tr{A [E, O] ρ_∞}`.
    pub slope: f64,
    /// `∫₀^τ w̃(τ−τ′, τ′) ξ(τ′) dτ′`.
    pub integral: Vec<f64>,
    /// First-order expectation curve.
    pub values: Vec<f64>,
    pub route: EventTimeRoute,
}

fn superoperator_norm(op: &Superoperator) -> f64 {
    op.matrix().clone().svd(false, false).singular_values.max()
}

/// First-order expectation `Ā(τ)` when the drive shifts event times.
pub fn response_event_time(
    model: &Model,
    pert: &EventPerturbation,
    observable: &Observable,
    initial: &DensityMatrix,
    grid: TimeGrid,
    route: EventTimeRoute,
) -> Result<EventTimeResponse, ResponseError> {
    pert.require(PerturbationKind::EventTime)?;
    let stationary = stationary_state(model)?;
    require_stationary(&stationary, initial)?;
    let rho = stationary.rho_inf.matrix();
    let w = model.waiting().as_ref();
    let bound = pert.lambda.abs() * superoperator_norm(&pert.op);
    for k in 1..grid.count() {
        let tau = grid.time(k);
        let value = w.survival(tau) - bound * w.density(tau) * pert.drive.integral(0.0, tau).abs();
        if value < 0.0 {
            return Err(ResponseError::NegativeSurvival { tau, value });
        }
    }
    let channel = model.channel().superoperator();
    let commutator = channel.compose(&pert.op).sub(&pert.op.compose(&channel));
    let a = observable.matrix();
    let baseline = trace_product(rho, a).re;
    let slope = trace_product(&commutator.apply(rho), a).re;
    let integral = event_time_integral(w, pert.drive, grid)?;
    let mut values: Vec<f64> = integral.iter().map(|i| baseline + pert.lambda * slope * i).collect();
    let shifted = channel.apply(&pert.op.apply(rho));
    let special = shifted.norm() < super::STATIONARY_TOL || (&shifted - rho).norm() < super::STATIONARY_TOL;
    if !special {
        if route == EventTimeRoute::SpecialCase {
            return Err(ResponseError::InvalidPerturbation(
                "E O ρ_∞ is neither ρ_∞ nor zero; the correlation term needs the experimental route".into(),
            ));
        }
        let extra = correlation_term(model, &shifted, observable, &integral, grid)?;
        for (v, e) in values.iter_mut().zip(extra) {
            *v += pert.lambda * e;
        }
    }
    Ok(EventTimeResponse {
        grid,
        baseline,
        slope,
        integral,
        values,
        route,
    })
}

/// `∫₀^τ g′(τ−s) I(s) ds` with `g(s) = Tr[A G(s) X]`, evaluated as
/// `d/dτ (g ∗ I) − g(0) I(τ)`.
fn correlation_term(
    model: &Model,
    x: &crate::qops::CMatrix,
    observable: &Observable,
    integral: &[f64],
    grid: TimeGrid,
) -> Result<Vec<f64>, ResponseError> {
    model.require_commuting()?;
    let w = model.waiting().as_ref();
    let counting = CountingTables::new(w, grid, None)?;
    let mut powers = vec![x.clone()];
    while powers.len() <= counting.order() {
        let next = model.channel().apply_operator(powers.last().expect("nonempty"));
        powers.push(next);
    }
    let h = model.hamiltonian();
    let g: Vec<f64> = (0..grid.count())
        .map(|k| {
            powers
                .iter()
                .enumerate()
                .map(|(m, p)| {
                    let weight = counting.count_curve(m).expect("tabulated").value(k);
                    weight * trace_product(&h.evolve_operator(p, grid.time(k)), observable.matrix()).re
                })
                .sum()
        })
        .collect();
    let g0 = g[0];
    let g = GridFunction::new(grid, g)?.with_fractional_order(w.fractional_order())?;
    let i = GridFunction::new(grid, integral.to_vec())?;
    let c = convolve(&g, &i)?;
    let h_step = grid.step();
    let n = grid.count();
    Ok((0..n)
        .map(|k| {
            let slope = if n < 3 {
                0.0
            } else if k == 0 {
                (-3.0 * c.value(0) + 4.0 * c.value(1) - c.value(2)) / (2.0 * h_step)
            } else if k == n - 1 {
                (3.0 * c.value(k) - 4.0 * c.value(k - 1) + c.value(k - 2)) / (2.0 * h_step)
            } else {
                (c.value(k + 1) - c.value(k - 1)) / (2.0 * h_step)
            };
            slope - g0 * integral[k]
        })
        .collect())
}

/// `P₀(τ)` on `grid`, for callers comparing against the unperturbed survival.
pub fn unperturbed_survival(w: &dyn WaitingTime, grid: TimeGrid) -> Result<GridFunction, ResponseError> {
    Ok(survival_on_grid(w, grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{sigma_z, Hamiltonian, KrausChannel};
    use crate::renewal::{BiExponential, Exponential, MittagLeffler};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn classical(w: Arc<dyn WaitingTime>) -> Model {
        Model::new(Hamiltonian::zero(2).unwrap(), KrausChannel::depolarizing(), w).unwrap()
    }

    #[test]
    fn markov_integral_is_stationary_convolution() {
        let g = 0.8;
        let om = 1.3;
        let w = Exponential::new(g).unwrap();
        let grid = TimeGrid::with_span(0.01, 6.0).unwrap();
        let i = event_time_integral(&w, Drive::Cos { omega: om }, grid).unwrap();
        for (k, v) in i.iter().enumerate() {
            let t = grid.time(k);
            let exact = g * (g * (om * t).cos() + om * (om * t).sin() - g * (-g * t).exp()) / (g * g + om * om);
            assert_abs_diff_eq!(*v, exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn classical_two_level_response() {
        let w: Arc<dyn WaitingTime> = Arc::new(BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap());
        let m = classical(w.clone());
        let drive = Drive::Cos { omega: 0.5 };
        let pert = EventPerturbation::event_time(0.05, drive, population_shift_operator()).unwrap();
        let grid = TimeGrid::with_span(0.02, 10.0).unwrap();
        let sz = Observable::new(sigma_z()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let r = response_event_time(&m, &pert, &sz, &mixed, grid, EventTimeRoute::SpecialCase).unwrap();
        assert_abs_diff_eq!(r.baseline, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.slope, 1.0, epsilon = 1e-14);
        let doubled = response_event_time(&m, &pert.with_lambda(0.1), &sz, &mixed, grid, EventTimeRoute::SpecialCase)
            .unwrap();
        for (a, b) in r.values.iter().zip(&doubled.values) {
            assert_abs_diff_eq!(2.0 * a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_drive_leaves_baseline() {
        let w: Arc<dyn WaitingTime> = Arc::new(MittagLeffler::new(0.5, 1.0).unwrap());
        let m = classical(w);
        let pert = EventPerturbation::event_time(0.1, Drive::Const { value: 0.0 }, population_shift_operator()).unwrap();
        let grid = TimeGrid::with_span(0.05, 5.0).unwrap();
        let sz = Observable::new(sigma_z()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let r = response_event_time(&m, &pert, &sz, &mixed, grid, EventTimeRoute::SpecialCase).unwrap();
        assert!(r.values.iter().all(|v| *v == r.baseline));
    }

    #[test]
    fn strong_drive_makes_survival_negative() {
        let w: Arc<dyn WaitingTime> = Arc::new(Exponential::new(1.0).unwrap());
        let m = classical(w);
        let pert = EventPerturbation::event_time(5.0, Drive::Const { value: 1.0 }, population_shift_operator()).unwrap();
        let grid = TimeGrid::with_span(0.05, 5.0).unwrap();
        let sz = Observable::new(sigma_z()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let err = response_event_time(&m, &pert, &sz, &mixed, grid, EventTimeRoute::SpecialCase);
        assert!(matches!(err, Err(ResponseError::NegativeSurvival { .. })));
    }

    #[test]
    fn perturbed_density_stays_normalized() {
        let drive = Drive::Cos { omega: 1.0 };
        let grid = TimeGrid::with_span(0.01, 30.0).unwrap();
        let variants: [Box<dyn WaitingTime>; 3] = [
            Box::new(Exponential::new(1.0).unwrap()),
            Box::new(BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap()),
            Box::new(MittagLeffler::new(0.5, 1.0).unwrap()),
        ];
        for w in &variants {
            for t in [0.0, 2.0, 7.5] {
                let total = perturbed_density_normalization(w.as_ref(), 0.1, 1.0, drive, t, grid).unwrap();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-5);
            }
        }
    }
}
