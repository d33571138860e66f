// SPDX-License-Identifier: Apache-2.0

//! Probabilities of observing a given number of renewal events.

use super::aged::{density_on_grid, survival_on_grid, AgedRenewalTables};
use super::{RenewalError, WaitingTime};
use crate::numerics::{convolve, shifted_product, GridFunction, TimeGrid};

/// Total-probability shortfall that triggers a truncation warning.
pub const TRUNCATION_WARNING: f64 = 1e-4;
/// Default count cut-off: the smallest `n` whose cumulative mass exceeds
/// `1 − DEFAULT_MASS_TOL`.
pub const DEFAULT_MASS_TOL: f64 = 1e-6;
/// Largest count order built automatically.
pub const MAX_ORDER: usize = 200;

/// `p₀(τ), …, p_{n_max}(τ)` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EventCounts {
    pub tau: f64,
    pub probabilities: Vec<f64>,
    pub total: f64,
    /// Set when the listed probabilities miss more than [`TRUNCATION_WARNING`].
    pub truncated: bool,
}

/// `P(τ,m;t,n)` indexed as `probabilities[m][n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeCounts {
    pub tau: f64,
    pub age: f64,
    pub probabilities: Vec<Vec<f64>>,
    pub total: f64,
    pub truncated: bool,
}

impl TwoTimeCounts {
    /// `Σ_n P(τ,m;t,n)` for each `m`.
    pub fn window_marginal(&self) -> Vec<f64> {
        self.probabilities.iter().map(|row| row.iter().sum()).collect()
    }

    /// `Σ_m P(τ,m;t,n)` for each `n`.
    pub fn age_marginal(&self) -> Vec<f64> {
        let cols = self.probabilities.first().map_or(0, Vec::len);
        (0..cols)
            .map(|n| self.probabilities.iter().map(|row| row[n]).sum())
            .collect()
    }
}

fn check_total(total: f64, what: &str) -> bool {
    let truncated = total < 1.0 - TRUNCATION_WARNING;
    if truncated {
        log::warn!("{what}: event-count probabilities sum to {total:.6}; raise the count cut-off");
    }
    truncated
}

/// Convolution powers `w^{(n)}` and count curves `p_n(·)` on a grid.
#[derive(Debug, Clone)]
pub struct CountingTables {
    grid: TimeGrid,
    density: GridFunction,
    survival: GridFunction,
    /// `w^{(n)}` at index `n − 1`.
    powers: Vec<GridFunction>,
    /// `p_n` at index `n`.
    counts: Vec<GridFunction>,
}

impl CountingTables {
    /// Builds `p_0..=p_{n_max}` on `grid`. Without an explicit order the
    /// construction stops once `Σ_n p_n` at the end of the grid exceeds
    /// `1 − DEFAULT_MASS_TOL`, or at [`MAX_ORDER`].
    pub fn new(w: &dyn WaitingTime, grid: TimeGrid, n_max: Option<usize>) -> Result<Self, RenewalError> {
        let density = density_on_grid(w, grid)?;
        let survival = survival_on_grid(w, grid)?;
        let mut tables = Self {
            grid,
            density,
            survival: survival.clone(),
            powers: Vec::new(),
            counts: vec![survival],
        };
        let last = grid.count() - 1;
        let mut mass = tables.counts[0].value(last);
        while match n_max {
            Some(n) => tables.counts.len() <= n,
            None => mass <= 1.0 - DEFAULT_MASS_TOL && tables.counts.len() <= MAX_ORDER,
        } {
            let next = match tables.powers.last() {
                None => tables.density.clone(),
                Some(prev) => convolve(&tables.density, prev)?,
            };
            let p = convolve(&tables.survival, &next)?;
            mass += p.value(last);
            tables.powers.push(next);
            tables.counts.push(p);
        }
        Ok(tables)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Highest tabulated count.
    pub fn order(&self) -> usize {
        self.counts.len() - 1
    }

    /// `p_n(·)`.
    pub fn count_curve(&self, n: usize) -> Option<&GridFunction> {
        self.counts.get(n)
    }

    /// `w^{(n)}` for `n ≥ 1`.
    pub fn power(&self, n: usize) -> Option<&GridFunction> {
        n.checked_sub(1).and_then(|i| self.powers.get(i))
    }

    fn index(&self, tau: f64) -> Result<usize, RenewalError> {
        self.grid
            .index_of(tau)
            .ok_or(RenewalError::OffGrid { tau, age: 0.0 })
    }

    /// `p_n(τ)` for `n = 0..=order`.
    pub fn at(&self, tau: f64) -> Result<EventCounts, RenewalError> {
        let k = self.index(tau)?;
        let probabilities: Vec<f64> = self.counts.iter().map(|p| p.value(k)).collect();
        let total = probabilities.iter().sum();
        Ok(EventCounts {
            tau,
            probabilities,
            total,
            truncated: check_total(total, "single-interval counts"),
        })
    }

    /// `P(τ,m;t,n)` for `m, n = 0..=order`; needs the grid to reach `τ + t`.
    pub fn two_time(&self, tau: f64, t: f64) -> Result<TwoTimeCounts, RenewalError> {
        let i = self.index(tau)?;
        let j = self.grid.index_of(t).ok_or(RenewalError::OffGrid { tau, age: t })?;
        if i + j >= self.grid.count() {
            return Err(RenewalError::OffGrid { tau: tau + t, age: t });
        }
        let order = self.order();
        let sub = TimeGrid::new(self.grid.step(), i + 1)?;
        let mut probabilities = vec![vec![0.0; order + 1]; order + 1];
        for n in 0..=order {
            // first-event density in the window after exactly n events before it
            let carried = if j == 0 {
                if n > 0 {
                    continue;
                }
                self.density.truncated(i + 1)?
            } else {
                let samples = (0..=i)
                    .map(|s| match self.power(n) {
                        None => self.density.value(s + j),
                        Some(wn) => shifted_product(&self.density, wn, s, j),
                    })
                    .collect();
                GridFunction::new(sub, samples)?.with_fractional_order(self.density.fractional_order())?
            };
            probabilities[0][n] = match self.power(n) {
                None => self.survival.value(i + j),
                Some(wn) => shifted_product(&self.survival, wn, i, j),
            };
            for m in 1..=order {
                probabilities[m][n] = shifted_product(&self.counts[m - 1], &carried, 0, i);
            }
        }
        let total = probabilities.iter().flatten().sum();
        Ok(TwoTimeCounts {
            tau,
            age: t,
            probabilities,
            total,
            truncated: check_total(total, "two-interval counts"),
        })
    }
}

/// `p_0(τ), …, p_{n_max}(τ)` on a grid of the given step.
pub fn event_count_probs(
    w: &dyn WaitingTime,
    step: f64,
    tau: f64,
    n_max: Option<usize>,
) -> Result<EventCounts, RenewalError> {
    let grid = TimeGrid::with_span(step, tau)?;
    CountingTables::new(w, grid, n_max)?.at(tau)
}

/// `P(τ,m;t,n)` on a grid of the given step.
pub fn two_time_event_probs(
    w: &dyn WaitingTime,
    step: f64,
    tau: f64,
    t: f64,
    n_max: Option<usize>,
) -> Result<TwoTimeCounts, RenewalError> {
    let grid = TimeGrid::with_span(step, tau + t)?;
    CountingTables::new(w, grid, n_max)?.two_time(tau, t)
}

/// Probabilities of `m` events in `(t, t+τ)` regardless of earlier ones:
/// `P̃₀(τ,t)` for `m = 0` and `∫₀^τ p_{m−1}(τ−s) w̃(s,t) ds` above.
pub fn aged_count_probs(
    aged: &AgedRenewalTables,
    counting: &CountingTables,
    tau: f64,
    t: f64,
) -> Result<EventCounts, RenewalError> {
    let (ha, hc) = (aged.grid().step(), counting.grid().step());
    if (ha - hc).abs() > 1e-15 * ha {
        return Err(RenewalError::InvalidParameter(
            "aged and counting tables use different steps".into(),
        ));
    }
    let i = aged.grid().index_of(tau).ok_or(RenewalError::OffGrid { tau, age: t })?;
    if i >= counting.grid().count() {
        return Err(RenewalError::OffGrid { tau, age: t });
    }
    let curves = aged.curves(t)?;
    let mut probabilities = vec![curves.survival().value(i)];
    for m in 1..=counting.order() {
        probabilities.push(shifted_product(&counting.counts[m - 1], curves.waiting(), 0, i));
    }
    let total = probabilities.iter().sum();
    Ok(EventCounts {
        tau,
        probabilities,
        total,
        truncated: check_total(total, "aged counts"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::{BiExponential, Exponential};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn poisson(n: usize, x: f64) -> f64 {
        (-x).exp() * x.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>()
    }

    #[test]
    fn poisson_counts() {
        let e = Exponential::new(1.0).unwrap();
        let c = event_count_probs(&e, 0.01, 1.0, Some(8)).unwrap();
        assert_abs_diff_eq!(c.probabilities[0], (-1.0f64).exp(), epsilon = 1e-12);
        for (n, p) in c.probabilities.iter().enumerate() {
            assert_abs_diff_eq!(*p, poisson(n, 1.0), epsilon = 1e-8);
        }
        assert!(!c.truncated);
    }

    #[test]
    fn default_order_reaches_mass() {
        let e = Exponential::new(1.0).unwrap();
        let c = event_count_probs(&e, 0.01, 3.0, None).unwrap();
        assert!(c.total > 1.0 - 1e-6);
        let short = event_count_probs(&e, 0.01, 3.0, Some(1)).unwrap();
        assert!(short.truncated);
    }

    #[test]
    fn two_time_factorizes_for_poisson() {
        let e = Exponential::new(1.0).unwrap();
        let p = two_time_event_probs(&e, 0.01, 1.5, 0.8, Some(10)).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                assert_abs_diff_eq!(
                    p.probabilities[m][n],
                    poisson(m, 1.5) * poisson(n, 0.8),
                    epsilon = 1e-7
                );
            }
        }
    }

    #[test]
    fn two_time_without_age() {
        let b = BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap();
        let grid = TimeGrid::with_span(0.01, 4.0).unwrap();
        let tables = CountingTables::new(&b, grid, Some(12)).unwrap();
        let p = tables.two_time(4.0, 0.0).unwrap();
        let single = tables.at(4.0).unwrap();
        for m in 0..=12 {
            assert_abs_diff_eq!(p.probabilities[m][0], single.probabilities[m], epsilon = 1e-9);
            for n in 1..=12 {
                assert_eq!(p.probabilities[m][n], 0.0);
            }
        }
    }

    #[test]
    fn marginals_agree() {
        let b = BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap();
        let grid = TimeGrid::with_span(0.01, 6.0).unwrap();
        let tables = CountingTables::new(&b, grid, Some(14)).unwrap();
        let p = tables.two_time(3.0, 3.0).unwrap();
        let at_t = tables.at(3.0).unwrap();
        for (n, v) in p.age_marginal().iter().enumerate() {
            assert_abs_diff_eq!(*v, at_t.probabilities[n], epsilon = 1e-6);
        }
        let aged = AgedRenewalTables::new(Arc::new(b), grid, &[3.0]).unwrap();
        let window = aged_count_probs(&aged, &tables, 3.0, 3.0).unwrap();
        for (m, v) in p.window_marginal().iter().enumerate() {
            assert_abs_diff_eq!(*v, window.probabilities[m], epsilon = 1e-6);
        }
    }
}
