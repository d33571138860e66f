// SPDX-License-Identifier: Apache-2.0

//! Drive acting on the event map: `E(τ) = E + λ ξ(τ) O`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{require_stationary, stationary_state, Drive, EventPerturbation, PerturbationKind, ResponseError};
use crate::numerics::{convolve, GridFunction, TimeGrid};
use crate::qops::{ket_bra, trace_product, CMatrix, DensityMatrix, Observable, Superoperator};
use crate::renewal::{
    sprinkling_on_grid, survival_on_grid, AgedRenewalTables, CountingTables, WaitingTime, MAX_ORDER,
};
use crate::trajectories::{run_realizations, EnsembleResult, Model};

/// Fewest grid points per period of the system or drive oscillation.
pub const MIN_POINTS_PER_PERIOD: usize = 20;

/// Operators with a smaller norm end the power sequence `E^m[O ρ_∞]`.
const VANISHING_NORM: f64 = 1e-14;

/// `X ↦ Tr(X) σ_z / 2`, the drive term of the depolarizing qubit model.
pub fn depolarizing_drive_operator() -> Superoperator {
    let mut terms = Vec::with_capacity(4);
    for a in 0..2 {
        let sign = if a == 0 { 0.5 } else { -0.5 };
        for b in 0..2 {
            terms.push((ket_bra(2, a, b).scale(sign), ket_bra(2, b, a)));
        }
    }
    Superoperator::from_sandwiches(2, &terms)
}

/// `χ(τ,τ′) = g(τ−τ′) f(τ′,t)` with `g(s) = Tr[A G(s) O ρ_∞]`.
#[derive(Debug, Clone)]
pub struct ResponseKernel {
    lambda: f64,
    age: f64,
    lag: GridFunction,
    sprinkling: GridFunction,
}

impl ResponseKernel {
    pub fn grid(&self) -> &TimeGrid {
        self.lag.grid()
    }

    pub fn age(&self) -> f64 {
        self.age
    }

    /// `g(s)` on the grid.
    pub fn lag(&self) -> &GridFunction {
        &self.lag
    }

    /// `f(τ′,t)` on the grid.
    pub fn sprinkling(&self) -> &GridFunction {
        &self.sprinkling
    }

    /// `χ(τ_i, τ′_j)` for `j ≤ i`.
    pub fn value(&self, i: usize, j: usize) -> Result<f64, ResponseError> {
        if j > i || i >= self.lag.len() {
            return Err(ResponseError::InvalidPerturbation(format!(
                "kernel index ({i}, {j}) outside the causal grid"
            )));
        }
        if j == 0 && self.sprinkling.singular_exponent().is_some() {
            return Err(crate::renewal::RenewalError::Singular { tau: 0.0, age: self.age }.into());
        }
        Ok(self.lag.value(i - j) * self.sprinkling.value(j))
    }

    /// First-order shift `λ ∫₀^τ χ(τ,τ′) ξ(τ′) dτ′` of the expectation.
    pub fn first_order(&self, drive: Drive) -> Result<Vec<f64>, ResponseError> {
        let driven = self.sprinkling.multiply(|s| drive.value(s))?;
        let conv = convolve(&self.lag, &driven)?;
        Ok(conv.samples().iter().map(|v| self.lambda * v).collect())
    }
}

/// Response kernel around the stationary state; the propagator is
/// `G(s) = Σ_m p_m(s) e^{sL_S} E^m`, so the model must commute.
///
/// `age` replaces `f(τ′,0)` by `f(τ′,t)` when the drive is switched on at
/// a later age of the renewal process.
pub fn response_kernel_event(
    model: &Model,
    pert: &EventPerturbation,
    observable: &Observable,
    initial: &DensityMatrix,
    grid: TimeGrid,
    age: Option<f64>,
) -> Result<ResponseKernel, ResponseError> {
    pert.require(PerturbationKind::Superoperator)?;
    model.require_commuting()?;
    let stationary = stationary_state(model)?;
    require_stationary(&stationary, initial)?;
    let w = model.waiting();
    let start = pert.op.apply(stationary.rho_inf.matrix());
    let mut powers = vec![start];
    while powers.len() <= MAX_ORDER {
        let last = powers.last().expect("nonempty");
        if last.norm() < VANISHING_NORM {
            powers.pop();
            break;
        }
        let next = model.channel().apply_operator(last);
        powers.push(next);
    }
    let lag = if powers.is_empty() {
        GridFunction::new(grid, vec![0.0; grid.count()])?
    } else {
        let counting = CountingTables::new(w.as_ref(), grid, Some(powers.len() - 1))?;
        let h = model.hamiltonian();
        let samples = (0..grid.count())
            .map(|k| {
                let s = grid.time(k);
                powers
                    .iter()
                    .enumerate()
                    .map(|(m, x)| {
                        let p = counting.count_curve(m).expect("tabulated").value(k);
                        p * trace_product(&h.evolve_operator(x, s), observable.matrix()).re
                    })
                    .sum()
            })
            .collect();
        GridFunction::new(grid, samples)?.with_fractional_order(w.fractional_order())?
    };
    let age = age.unwrap_or(0.0);
    let sprinkling = if age == 0.0 {
        sprinkling_on_grid(w.as_ref(), grid)?
    } else {
        AgedRenewalTables::new(Arc::clone(w), grid, &[age])?
            .curves(age)?
            .sprinkling()
            .clone()
    };
    Ok(ResponseKernel {
        lambda: pert.lambda,
        age,
        lag,
        sprinkling,
    })
}

fn check_resolution(step: f64, frequencies: &[f64]) -> Result<(), ResponseError> {
    for &f in frequencies {
        if f > 0.0 {
            let period = 2.0 * PI / f;
            if step * MIN_POINTS_PER_PERIOD as f64 > period * (1.0 + 1e-12) {
                return Err(ResponseError::UnderResolved { step, period });
            }
        }
    }
    Ok(())
}

/// `S_Z(τ) = λ ∫₀^τ P₀(τ−τ′) cos[Ω(τ−τ′)] f(τ′,0) ξ(τ′) dτ′` for the
/// depolarizing qubit with flow `−iΩ[σ_x, ·]/2`; exact at every order in λ.
pub fn sz_exact_depolarizing(
    w: &dyn WaitingTime,
    big_omega: f64,
    drive: Drive,
    lambda: f64,
    grid: TimeGrid,
) -> Result<Vec<f64>, ResponseError> {
    check_resolution(grid.step(), &[big_omega.abs(), drive.frequency()])?;
    let rotating = survival_on_grid(w, grid)?.multiply(|s| (big_omega * s).cos())?;
    let driven = sprinkling_on_grid(w, grid)?.multiply(|s| drive.value(s))?;
    let conv = convolve(&rotating, &driven)?;
    Ok(conv.samples().iter().map(|v| lambda * v).collect())
}

/// Parameters of the driven depolarizing qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingDrive {
    /// Rabi frequency `Ω` of the free flow.
    pub big_omega: f64,
    pub drive: Drive,
    pub lambda: f64,
    /// `S_Z` before the first event.
    pub initial: f64,
}

/// Monte Carlo mean of the scalar process that rotates as `cos Ω(τ−τ_i)`
/// between events and restarts from `λ ξ(τ_i)` at each event `τ_i`.
pub fn simulate_perturbed_depolarizing(
    w: &Arc<dyn WaitingTime>,
    params: &DepolarizingDrive,
    grid: TimeGrid,
    realizations: usize,
    seed: u64,
) -> Result<EnsembleResult, ResponseError> {
    if realizations == 0 {
        return Err(ResponseError::InvalidPerturbation("at least one realization is required".into()));
    }
    let count = grid.count();
    let moments = run_realizations(realizations, seed, count, |rng, out| {
        let mut s = params.initial;
        let mut last = 0.0;
        let mut next = w.sample(rng);
        for (k, slot) in out.iter_mut().enumerate() {
            let tau = grid.time(k);
            while next <= tau {
                s = params.lambda * params.drive.value(next);
                last = next;
                next += w.sample(rng);
            }
            *slot = (params.big_omega * (tau - last)).cos() * s;
        }
    });
    Ok(EnsembleResult {
        grid,
        age: 0.0,
        names: vec!["S_Z".into()],
        means: vec![moments.mean().to_vec()],
        stderr: vec![moments.stderr()],
        realizations,
        seed,
    })
}

/// Depolarizing model with flow `−iΩ[σ_x, ·]/2`.
pub fn depolarizing_model(
    w: Arc<dyn WaitingTime>,
    big_omega: f64,
) -> Result<Model, ResponseError> {
    use crate::qops::{sigma_x, Hamiltonian, KrausChannel};
    let h: CMatrix = sigma_x().scale(big_omega / 2.0);
    Ok(Model::new(Hamiltonian::new(h)?, KrausChannel::depolarizing(), w)?)
}
