// SPDX-License-Identifier: Apache-2.0

//! Ensemble states from event-count probabilities, valid when the free
//! flow commutes with the event map.

use std::sync::Arc;

use super::{check_age, Model, Preparation, TrajectoryError};
use crate::numerics::TimeGrid;
use crate::qops::{hermitian_part, CMatrix, DensityMatrix};
use crate::renewal::{aged_count_probs, AgedRenewalTables, CountingTables, RenewalError, WaitingTime};

/// Fewest cells of an oracle grid.
const MIN_CELLS: usize = 8;

/// Resolution of the count tables behind the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Step of the internal grid; requested times must be multiples of it.
    pub step: f64,
    /// Highest event count kept; `None` picks it from the mass criterion.
    pub n_max: Option<usize>,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { step: 0.01, n_max: None }
    }
}

pub(crate) fn oracle_grid(step: f64, span: f64) -> Result<TimeGrid, TrajectoryError> {
    let cells = ((span / step) - 1e-9).ceil().max(MIN_CELLS as f64) as usize;
    Ok(TimeGrid::new(step, cells + 1)?)
}

fn on_grid(grid: &TimeGrid, t: f64) -> Result<usize, TrajectoryError> {
    grid.index_of(t).ok_or_else(|| {
        TrajectoryError::InvalidArgument(format!(
            "time {t} is not a multiple of the oracle step {}",
            grid.step()
        ))
    })
}

/// `p̃_m(τ,t)`, the probabilities of `m` events in `(t, t+τ)`, for every
/// `τ` on `taus`.
pub fn window_counts(
    w: &Arc<dyn WaitingTime>,
    age: f64,
    taus: &TimeGrid,
    settings: &OracleSettings,
) -> Result<Vec<Vec<f64>>, TrajectoryError> {
    check_age(age)?;
    let grid = oracle_grid(settings.step, taus.span())?;
    let counting = CountingTables::new(w.as_ref(), grid, settings.n_max)?;
    let aged = if age > 0.0 {
        Some(AgedRenewalTables::new(w.clone(), grid, &[age])?)
    } else {
        None
    };
    taus.times()
        .map(|tau| {
            on_grid(&grid, tau)?;
            let counts = match &aged {
                None => counting.at(tau)?,
                Some(a) => aged_count_probs(a, &counting, tau, age)?,
            };
            Ok(counts.probabilities)
        })
        .collect()
}

/// `Σ_m (−1)^m p̃_m(τ,t)`, the coherence left by sign-flipping events.
pub fn parity_decay(
    w: &Arc<dyn WaitingTime>,
    age: f64,
    taus: &TimeGrid,
    settings: &OracleSettings,
) -> Result<Vec<f64>, TrajectoryError> {
    Ok(window_counts(w, age, taus, settings)?
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(m, v)| if m % 2 == 0 { *v } else { -*v })
                .sum()
        })
        .collect())
}

/// Coherence decay `P̃₀(τ,t)` after preparation at age `t`.
pub fn dephasing_coherence(tables: &AgedRenewalTables, tau: f64, t: f64) -> Result<f64, RenewalError> {
    tables.aged_survival(tau, t)
}

/// [`dephasing_coherence`] for every `τ` on `taus`.
pub fn dephasing_coherence_curve(
    w: &Arc<dyn WaitingTime>,
    age: f64,
    taus: &TimeGrid,
    settings: &OracleSettings,
) -> Result<Vec<f64>, TrajectoryError> {
    check_age(age)?;
    let grid = oracle_grid(settings.step, taus.span())?;
    let tables = AgedRenewalTables::new(w.clone(), grid, &[age])?;
    taus.times()
        .map(|tau| {
            on_grid(&grid, tau)?;
            Ok(dephasing_coherence(&tables, tau, age)?)
        })
        .collect()
}

/// `Σ_k q_k E^k[x]` normalized by `Σ_k q_k`; `powers[k−1]` caches `E^k[x]`.
fn mix_powers(model: &Model, x: &CMatrix, weights: &[f64], powers: &mut Vec<CMatrix>) -> CMatrix {
    while powers.len() + 1 < weights.len() {
        let next = model.channel().apply_operator(powers.last().unwrap_or(x));
        powers.push(next);
    }
    let total: f64 = weights.iter().sum();
    let mut out = x.scale(weights[0]);
    for (q, p) in weights[1..].iter().zip(powers.iter()) {
        out += p.scale(*q);
    }
    out.scale(1.0 / total)
}

/// Ensemble state at `age + τ` for every `τ` on `taus`.
///
/// Without preparation the state is `Σ_k p_k(t+τ) E^k[ρ₀]`, which groups
/// `Σ_{m+n=k} P(τ,m;t,n)`; with preparation it is `Σ_m p̃_m(τ,t) E^m[ρ_Π]`.
/// Both are rotated by `exp[(t+τ)L_S]` and renormalized to unit trace.
pub fn semi_analytic_curve(
    model: &Model,
    rho0: &DensityMatrix,
    prep: &Preparation,
    age: f64,
    taus: &TimeGrid,
    settings: &OracleSettings,
) -> Result<Vec<DensityMatrix>, TrajectoryError> {
    model.require_commuting()?;
    check_age(age)?;
    model.check_operator(rho0.matrix())?;
    let (start, weights) = match prep {
        Preparation::None => {
            let grid = oracle_grid(settings.step, age + taus.span())?;
            let counting = CountingTables::new(model.waiting().as_ref(), grid, settings.n_max)?;
            let weights = taus
                .times()
                .map(|tau| {
                    on_grid(&grid, age + tau)?;
                    Ok(counting.at(age + tau)?.probabilities)
                })
                .collect::<Result<Vec<_>, TrajectoryError>>()?;
            (rho0.matrix().clone(), weights)
        }
        Preparation::AtAge { target } => {
            model.check_operator(target.matrix())?;
            (target.matrix().clone(), window_counts(model.waiting(), age, taus, settings)?)
        }
    };
    let mut powers = Vec::new();
    taus.times()
        .zip(&weights)
        .map(|(tau, q)| {
            let mixed = mix_powers(model, &start, q, &mut powers);
            let rotated = model.hamiltonian().evolve_operator(&mixed, age + tau);
            Ok(DensityMatrix::new(hermitian_part(&rotated))?)
        })
        .collect()
}

/// Single-time version of [`semi_analytic_curve`].
pub fn semi_analytic_state(
    model: &Model,
    rho0: &DensityMatrix,
    prep: &Preparation,
    age: f64,
    tau: f64,
    settings: &OracleSettings,
) -> Result<DensityMatrix, TrajectoryError> {
    let taus = if tau == 0.0 {
        TimeGrid::new(settings.step, 1)?
    } else {
        TimeGrid::new(tau, 2)?
    };
    let mut curve = semi_analytic_curve(model, rho0, prep, age, &taus, settings)?;
    Ok(curve.pop().expect("grid has at least one point"))
}
