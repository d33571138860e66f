// SPDX-License-Identifier: Apache-2.0

//! Aged renewal statistics: `w̃(τ,t)`, `P̃₀(τ,t)`, `f(τ,t)`, `Δ(τ,t)` and
//! `Υ(τ,t)` tabulated on a uniform grid for a set of ages.

use std::sync::Arc;

use rayon::prelude::*;

use super::{RenewalError, WaitingTime};
use crate::numerics::{
    convolve, gamma, incomplete_beta, ln_gamma, shifted_product, solve_renewal, CompensatedSum,
    GridFunction, TimeGrid,
};

/// `w` sampled on `grid`, carrying its origin singularity when present.
pub fn density_on_grid(w: &dyn WaitingTime, grid: TimeGrid) -> Result<GridFunction, RenewalError> {
    Ok(GridFunction::from_fn(grid, |t| w.density(t), w.singularity())?
        .with_fractional_order(w.fractional_order())?)
}

/// `P₀` sampled on `grid`.
pub fn survival_on_grid(w: &dyn WaitingTime, grid: TimeGrid) -> Result<GridFunction, RenewalError> {
    Ok(GridFunction::from_fn(grid, |t| w.survival(t), None)?.with_fractional_order(w.fractional_order())?)
}

/// `f(·,0)` on `grid`: the closed form when the variant has one, otherwise
/// the renewal-equation solution.
pub fn sprinkling_on_grid(w: &dyn WaitingTime, grid: TimeGrid) -> Result<GridFunction, RenewalError> {
    match w.sprinkling() {
        Some(s) => Ok(GridFunction::from_fn(grid, |t| s.value(t), s.singularity())?
            .with_fractional_order(w.fractional_order())?),
        None => Ok(solve_renewal(&density_on_grid(w, grid)?)?),
    }
}

/// Tables for one age `t = index·step`.
#[derive(Debug, Clone)]
pub struct AgedCurves {
    index: usize,
    age: f64,
    waiting: GridFunction,
    survival: GridFunction,
    sprinkling: GridFunction,
}

impl AgedCurves {
    pub fn age(&self) -> f64 {
        self.age
    }

    /// `w̃(·,t)`.
    pub fn waiting(&self) -> &GridFunction {
        &self.waiting
    }

    /// `P̃₀(·,t)`.
    pub fn survival(&self) -> &GridFunction {
        &self.survival
    }

    /// `f(·,t)`.
    pub fn sprinkling(&self) -> &GridFunction {
        &self.sprinkling
    }
}

/// Aged renewal quantities on a `τ` grid for a fixed list of on-grid ages.
///
/// Base quantities live on an extended grid reaching `τ_max + t_max` so that
/// shifted arguments `τ + t` stay on the grid.
#[derive(Debug, Clone)]
pub struct AgedRenewalTables {
    waiting: Arc<dyn WaitingTime>,
    grid: TimeGrid,
    density: GridFunction,
    survival: GridFunction,
    sprinkling: GridFunction,
    curves: Vec<AgedCurves>,
}

impl AgedRenewalTables {
    /// Builds the tables for every age in `ages`, in parallel.
    pub fn new(waiting: Arc<dyn WaitingTime>, grid: TimeGrid, ages: &[f64]) -> Result<Self, RenewalError> {
        let mut indices = Vec::with_capacity(ages.len());
        for &t in ages {
            let j = age_index(&grid, t).ok_or(RenewalError::OffGrid { tau: 0.0, age: t })?;
            if !indices.contains(&j) {
                indices.push(j);
            }
        }
        let max_age = indices.iter().copied().max().unwrap_or(0);
        // one spare node keeps central differences of f(·,0) available at the far end
        let extended = TimeGrid::new(grid.step(), grid.count() + max_age + 1)?;
        let w = waiting.as_ref();
        let density = density_on_grid(w, extended)?;
        let survival = survival_on_grid(w, extended)?;
        let sprinkling = sprinkling_on_grid(w, extended)?;
        let mut tables = Self {
            waiting,
            grid,
            density,
            survival,
            sprinkling,
            curves: Vec::new(),
        };
        let curves: Result<Vec<AgedCurves>, RenewalError> =
            indices.par_iter().map(|&j| tables.build_age(j)).collect();
        tables.curves = curves?;
        tables.curves.sort_by_key(|c| c.index);
        Ok(tables)
    }

    fn build_age(&self, j: usize) -> Result<AgedCurves, RenewalError> {
        let n = self.grid.count();
        let age = self.grid.time(j);
        if j == 0 {
            let sprinkling = self.sprinkling.truncated(n)?;
            return Ok(AgedCurves {
                index: 0,
                age,
                waiting: self.density.truncated(n)?,
                survival: self.survival.truncated(n)?,
                sprinkling,
            });
        }
        let w = &self.density;
        let p0 = &self.survival;
        let f0 = &self.sprinkling;
        let waiting: Vec<f64> = (0..n)
            .map(|i| w.value(i + j) + shifted_product(w, f0, i, j))
            .collect();
        let survival: Vec<f64> = (0..n)
            .map(|i| p0.value(i + j) + shifted_product(p0, f0, i, j))
            .collect();
        let order = self.waiting.fractional_order();
        let waiting = GridFunction::new(self.grid, waiting)?.with_fractional_order(order)?;
        let survival = GridFunction::new(self.grid, survival)?.with_fractional_order(order)?;
        let f0_tau = self.sprinkling.truncated(n)?;
        let carried = convolve(&f0_tau, &waiting)?;
        let sprinkling: Vec<f64> = (0..n).map(|i| waiting.value(i) + carried.value(i)).collect();
        Ok(AgedCurves {
            index: j,
            age,
            waiting,
            survival,
            sprinkling: GridFunction::new(self.grid, sprinkling)?.with_fractional_order(order)?,
        })
    }

    pub fn waiting_time(&self) -> &Arc<dyn WaitingTime> {
        &self.waiting
    }

    /// The `τ` grid.
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `w` on the extended grid.
    pub fn density(&self) -> &GridFunction {
        &self.density
    }

    /// `P₀` on the extended grid.
    pub fn base_survival(&self) -> &GridFunction {
        &self.survival
    }

    /// `f(·,0)` on the extended grid.
    pub fn base_sprinkling(&self) -> &GridFunction {
        &self.sprinkling
    }

    pub fn ages(&self) -> impl Iterator<Item = f64> + '_ {
        self.curves.iter().map(|c| c.age)
    }

    /// All tables for age `t`.
    pub fn curves(&self, t: f64) -> Result<&AgedCurves, RenewalError> {
        let j = age_index(&self.grid, t).ok_or(RenewalError::OffGrid { tau: 0.0, age: t })?;
        self.curves
            .iter()
            .find(|c| c.index == j)
            .ok_or(RenewalError::AgeNotTabulated(t))
    }

    fn lookup(&self, tau: f64, t: f64) -> Result<(usize, &AgedCurves), RenewalError> {
        let i = self.grid.index_of(tau).ok_or(RenewalError::OffGrid { tau, age: t })?;
        Ok((i, self.curves(t)?))
    }

    fn finite(&self, tau: f64, t: f64, g: &GridFunction, i: usize) -> Result<f64, RenewalError> {
        if i == 0 && g.singular_exponent().is_some() {
            return Err(RenewalError::Singular { tau, age: t });
        }
        Ok(g.value(i))
    }

    /// `P̃₀(τ,t)`.
    pub fn aged_survival(&self, tau: f64, t: f64) -> Result<f64, RenewalError> {
        let (i, c) = self.lookup(tau, t)?;
        Ok(c.survival.value(i))
    }

    /// `w̃(τ,t)`.
    pub fn aged_waiting(&self, tau: f64, t: f64) -> Result<f64, RenewalError> {
        let (i, c) = self.lookup(tau, t)?;
        self.finite(tau, t, &c.waiting, i)
    }

    /// `f(τ,t)`.
    pub fn aged_sprinkling(&self, tau: f64, t: f64) -> Result<f64, RenewalError> {
        let (i, c) = self.lookup(tau, t)?;
        self.finite(tau, t, &c.sprinkling, i)
    }

    /// `Δ(τ,t) = f(τ,t) − f(τ,0)`.
    pub fn delta(&self, tau: f64, t: f64) -> Result<f64, RenewalError> {
        let (i, c) = self.lookup(tau, t)?;
        if c.index == 0 {
            return Ok(0.0);
        }
        let aged = self.finite(tau, t, &c.sprinkling, i)?;
        let fresh = self.finite(tau, t, &self.sprinkling, i)?;
        Ok(aged - fresh)
    }

    /// `Υ(τ,t) = ∂f(τ,t)/∂t`, evaluated as the slope of `f(·,0)` at `τ + t`.
    pub fn upsilon(&self, tau: f64, t: f64) -> Result<f64, RenewalError> {
        let (i, c) = self.lookup(tau, t)?;
        let k = i + c.index;
        if let Some(s) = self.waiting.sprinkling() {
            if k == 0 && s.singularity().is_some() {
                return Err(RenewalError::Singular { tau, age: t });
            }
            return Ok(s.derivative(self.grid.time(k)));
        }
        let f = &self.sprinkling;
        let h = self.grid.step();
        Ok(if k == 0 {
            (-3.0 * f.value(0) + 4.0 * f.value(1) - f.value(2)) / (2.0 * h)
        } else {
            (f.value(k + 1) - f.value(k - 1)) / (2.0 * h)
        })
    }
}

fn age_index(grid: &TimeGrid, t: f64) -> Option<usize> {
    if !(t.is_finite() && t >= 0.0) {
        return None;
    }
    let k = (t / grid.step()).round();
    ((k * grid.step() - t).abs() <= 1e-9 * t.max(grid.step())).then_some(k as usize)
}

/// Largest `A(τ+t)^α` accepted by [`aged_survival_series`].
pub const SERIES_ARGUMENT_LIMIT: f64 = 10.0;

/// Aged survival of the fractional waiting time as the power series
/// `Σ_k [−A(τ+t)^α]^k / Γ(αk+1) · [1 + B_k]`,
/// `B_k = A(τ+t)^α / Γ(α) · β[t/(τ+t); α, 1 + kα]`.
pub fn aged_survival_series(alpha: f64, amplitude: f64, tau: f64, t: f64) -> Result<f64, RenewalError> {
    if !(alpha > 0.0 && alpha <= 1.0 && amplitude > 0.0 && tau >= 0.0 && t >= 0.0) {
        return Err(RenewalError::InvalidParameter(format!(
            "series needs 0 < α ≤ 1, A > 0 and nonnegative times (α = {alpha}, A = {amplitude}, τ = {tau}, t = {t})"
        )));
    }
    let span = tau + t;
    if span == 0.0 {
        return Ok(1.0);
    }
    let x = amplitude * span.powf(alpha);
    if x > SERIES_ARGUMENT_LIMIT {
        return Err(RenewalError::Divergence(format!(
            "series argument A(τ+t)^α = {x:.3} exceeds {SERIES_ARGUMENT_LIMIT}"
        )));
    }
    let ratio = t / span;
    let scale = x / gamma(alpha);
    let ln_x = x.ln();
    let mut acc = CompensatedSum::default();
    let mut largest: f64 = 0.0;
    for k in 0..100_000usize {
        let kf = k as f64;
        let log_mag = kf * ln_x - ln_gamma(alpha * kf + 1.0);
        if log_mag > 700.0 {
            return Err(RenewalError::Divergence(format!(
                "series term {k} overflows at A(τ+t)^α = {x:.3}"
            )));
        }
        let mag = log_mag.exp();
        let b_k = if ratio > 0.0 {
            scale * incomplete_beta(ratio, alpha, 1.0 + kf * alpha)
        } else {
            0.0
        };
        let term = mag * (1.0 + b_k);
        largest = largest.max(term);
        acc.add(if k % 2 == 0 { term } else { -term });
        if kf * alpha > x && term < 1e-17 * largest {
            break;
        }
    }
    Ok(acc.value())
}

/// Long-time form of the fractional aged survival,
/// `[A^{−1} + t^α/(αΓ(α))] / [Γ(1−α)(τ+t)^α]`, valid for `α < 1`.
pub fn aged_survival_asymptotic(alpha: f64, amplitude: f64, tau: f64, t: f64) -> f64 {
    let span = (tau + t).powf(alpha);
    (1.0 / amplitude + t.powf(alpha) / (alpha * gamma(alpha))) / (gamma(1.0 - alpha) * span)
}
