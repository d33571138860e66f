// SPDX-License-Identifier: Apache-2.0

//! Waiting-time distributions and the registry that builds them by name.

use std::any::Any;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::RenewalError;
use crate::numerics::{
    gamma, laplace_numeric, mittag_leffler, mittag_leffler_aa, GridFunction, TailModel, TimeGrid,
};

/// Density `w(τ)` of the interval between consecutive events.
pub trait WaitingTime: fmt::Debug + Send + Sync {
    /// Registry name of the variant.
    fn name(&self) -> &'static str;

    /// `w(τ)`; variants with a singular origin only accept `τ > 0`.
    fn density(&self, tau: f64) -> f64;

    /// `P₀(τ) = 1 − ∫₀^τ w`.
    fn survival(&self, tau: f64) -> f64;

    /// `∫₀^∞ e^{−uτ} w(τ) dτ` for `u > 0`.
    fn laplace(&self, u: f64) -> f64;

    /// Memory kernel `K(u) = u w(u) / (1 − w(u))`.
    fn kernel_laplace(&self, u: f64) -> f64 {
        let w = self.laplace(u);
        u * w / (1.0 - w)
    }

    /// Draws one interval.
    fn sample(&self, rng: &mut dyn RngCore) -> f64;

    /// `(β, c)` with `w(τ) ≈ c τ^β` near the origin, for `β < 0`.
    fn singularity(&self) -> Option<(f64, f64)> {
        None
    }

    /// `α < 1` when `τ^{−β} w(τ)` is smooth in `τ^α` rather than in `τ`.
    fn fractional_order(&self) -> Option<f64> {
        None
    }

    /// Closed-form sprinkling density `f(τ,0)`, when the variant has one
    /// that replaces the renewal-equation solve.
    fn sprinkling(&self) -> Option<&dyn ClosedSprinkling> {
        None
    }

    /// Mean interval, `None` when it diverges.
    fn mean(&self) -> Option<f64>;

    /// Decay model beyond a finite grid, for numeric transforms.
    fn tail(&self) -> TailModel;

    fn as_any(&self) -> &dyn Any;
}

/// Analytic `f(τ,0)` with its behaviour at the origin.
pub trait ClosedSprinkling {
    fn value(&self, tau: f64) -> f64;
    fn derivative(&self, tau: f64) -> f64;
    /// `(β, c)` with `f(τ,0) ≈ c τ^β` near the origin.
    fn singularity(&self) -> Option<(f64, f64)>;
}

fn uniform_open(rng: &mut dyn RngCore) -> f64 {
    // (0, 1]
    1.0 - rng.random::<f64>()
}

fn require(cond: bool, what: impl Into<String>) -> Result<(), RenewalError> {
    if cond {
        Ok(())
    } else {
        Err(RenewalError::InvalidParameter(what.into()))
    }
}

/// `w(τ) = γ e^{−γτ}`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponential {
    pub rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self, RenewalError> {
        require(rate.is_finite() && rate > 0.0, format!("rate must be positive, got {rate}"))?;
        Ok(Self { rate })
    }
}

impl WaitingTime for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn density(&self, tau: f64) -> f64 {
        self.rate * (-self.rate * tau).exp()
    }

    fn survival(&self, tau: f64) -> f64 {
        (-self.rate * tau).exp()
    }

    fn laplace(&self, u: f64) -> f64 {
        self.rate / (self.rate + u)
    }

    fn kernel_laplace(&self, _u: f64) -> f64 {
        self.rate
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        -uniform_open(rng).ln() / self.rate
    }

    fn mean(&self) -> Option<f64> {
        Some(1.0 / self.rate)
    }

    fn tail(&self) -> TailModel {
        TailModel::Exponential { rate: self.rate }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Two-component exponential mixture `P_a γ_a e^{−γ_a τ} + P_b γ_b e^{−γ_b τ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiExponential {
    pub weight_a: f64,
    pub rate_a: f64,
    pub weight_b: f64,
    pub rate_b: f64,
    renormalized: bool,
}

impl BiExponential {
    /// Weights that do not sum to one are rescaled, with a warning.
    pub fn new(weight_a: f64, rate_a: f64, weight_b: f64, rate_b: f64) -> Result<Self, RenewalError> {
        require(
            weight_a.is_finite() && weight_b.is_finite() && weight_a >= 0.0 && weight_b >= 0.0,
            "mixture weights must be nonnegative",
        )?;
        let total = weight_a + weight_b;
        require(total > 0.0, "mixture weights must not both vanish")?;
        require(
            rate_a.is_finite() && rate_b.is_finite() && rate_a > 0.0 && rate_b > 0.0,
            "rates must be positive",
        )?;
        let renormalized = (total - 1.0).abs() > 1e-12;
        if renormalized {
            log::warn!(
                "bi-exponential weights {weight_a} + {weight_b} = {total}; rescaling to unit sum"
            );
        }
        Ok(Self {
            weight_a: weight_a / total,
            rate_a,
            weight_b: weight_b / total,
            rate_b,
            renormalized,
        })
    }

    /// Whether the weights supplied to [`BiExponential::new`] had to be rescaled.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    /// `⟨γ⟩ = P_a γ_a + P_b γ_b`.
    pub fn mean_rate(&self) -> f64 {
        self.weight_a * self.rate_a + self.weight_b * self.rate_b
    }

    /// `⟨τ⟩ = P_a/γ_a + P_b/γ_b`.
    pub fn mean_time(&self) -> f64 {
        self.weight_a / self.rate_a + self.weight_b / self.rate_b
    }

    /// Closed-form `f(τ,0) = 1/⟨τ⟩ + (⟨γ⟩ − 1/⟨τ⟩) e^{−ητ}` with
    /// `η = P_a γ_b + P_b γ_a`.
    pub fn sprinkling_closed_form(&self, tau: f64) -> f64 {
        let eta = self.weight_a * self.rate_b + self.weight_b * self.rate_a;
        let base = 1.0 / self.mean_time();
        base + (self.mean_rate() - base) * (-eta * tau).exp()
    }
}

impl WaitingTime for BiExponential {
    fn name(&self) -> &'static str {
        "bi-exponential"
    }

    fn density(&self, tau: f64) -> f64 {
        self.weight_a * self.rate_a * (-self.rate_a * tau).exp()
            + self.weight_b * self.rate_b * (-self.rate_b * tau).exp()
    }

    fn survival(&self, tau: f64) -> f64 {
        self.weight_a * (-self.rate_a * tau).exp() + self.weight_b * (-self.rate_b * tau).exp()
    }

    fn laplace(&self, u: f64) -> f64 {
        self.weight_a * self.rate_a / (self.rate_a + u) + self.weight_b * self.rate_b / (self.rate_b + u)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let rate = if rng.random::<f64>() < self.weight_a {
            self.rate_a
        } else {
            self.rate_b
        };
        -uniform_open(rng).ln() / rate
    }

    fn mean(&self) -> Option<f64> {
        Some(self.mean_time())
    }

    fn tail(&self) -> TailModel {
        let slow = if self.weight_a == 0.0 {
            self.rate_b
        } else if self.weight_b == 0.0 {
            self.rate_a
        } else {
            self.rate_a.min(self.rate_b)
        };
        TailModel::Exponential { rate: slow }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Fractional waiting time with `P₀(τ) = E_α(−A τ^α)` and
/// `w(τ) = A τ^{α−1} E_{α,α}(−A τ^α)`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MittagLeffler {
    pub alpha: f64,
    pub amplitude: f64,
}

impl MittagLeffler {
    pub fn new(alpha: f64, amplitude: f64) -> Result<Self, RenewalError> {
        require(alpha > 0.0 && alpha <= 1.0, format!("alpha must lie in (0, 1], got {alpha}"))?;
        require(
            amplitude.is_finite() && amplitude > 0.0,
            format!("amplitude must be positive, got {amplitude}"),
        )?;
        Ok(Self { alpha, amplitude })
    }

    /// Large-τ form `P₀(τ) ≈ A^{−1} τ^{−α} / Γ(1 − α)`, for `α < 1`.
    pub fn survival_asymptotic(&self, tau: f64) -> f64 {
        1.0 / (self.amplitude * tau.powf(self.alpha) * gamma(1.0 - self.alpha))
    }
}

impl WaitingTime for MittagLeffler {
    fn name(&self) -> &'static str {
        "mittag-leffler"
    }

    fn density(&self, tau: f64) -> f64 {
        let a = self.alpha;
        if a == 1.0 {
            return self.amplitude * (-self.amplitude * tau).exp();
        }
        assert!(tau > 0.0, "fractional density is singular at the origin");
        let x = self.amplitude * tau.powf(a);
        x / tau * mittag_leffler_aa(a, -x)
    }

    fn survival(&self, tau: f64) -> f64 {
        mittag_leffler(self.alpha, -self.amplitude * tau.powf(self.alpha))
    }

    fn laplace(&self, u: f64) -> f64 {
        self.amplitude / (self.amplitude + u.powf(self.alpha))
    }

    fn kernel_laplace(&self, u: f64) -> f64 {
        self.amplitude * u.powf(1.0 - self.alpha)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let a = self.alpha;
        let e = -uniform_open(rng).ln();
        if a == 1.0 {
            return e / self.amplitude;
        }
        let v = uniform_open(rng);
        // sin(απ)/tan(απv) − cos(απ), written without cancellation
        let ratio = (a * PI * (1.0 - v)).sin() / (a * PI * v).sin();
        e * ratio.powf(1.0 / a) / self.amplitude.powf(1.0 / a)
    }

    fn singularity(&self) -> Option<(f64, f64)> {
        (self.alpha < 1.0).then(|| (self.alpha - 1.0, self.amplitude / gamma(self.alpha)))
    }

    fn fractional_order(&self) -> Option<f64> {
        (self.alpha < 1.0).then_some(self.alpha)
    }

    fn sprinkling(&self) -> Option<&dyn ClosedSprinkling> {
        Some(self)
    }

    fn mean(&self) -> Option<f64> {
        (self.alpha == 1.0).then(|| 1.0 / self.amplitude)
    }

    fn tail(&self) -> TailModel {
        if self.alpha == 1.0 {
            TailModel::Exponential { rate: self.amplitude }
        } else {
            TailModel::PowerLaw { exponent: 1.0 + self.alpha }
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

impl ClosedSprinkling for MittagLeffler {
    fn value(&self, tau: f64) -> f64 {
        self.amplitude * tau.powf(self.alpha - 1.0) / gamma(self.alpha)
    }

    fn derivative(&self, tau: f64) -> f64 {
        self.amplitude * (self.alpha - 1.0) * tau.powf(self.alpha - 2.0) / gamma(self.alpha)
    }

    fn singularity(&self) -> Option<(f64, f64)> {
        WaitingTime::singularity(self)
    }
}

/// Density tabulated on a uniform grid and continued by an exponential tail
/// `w(T) e^{−r(τ−T)}` beyond the last node.
#[derive(Debug, Clone)]
pub struct Tabulated {
    density: GridFunction,
    tail_rate: f64,
    cumulative: Vec<f64>,
}

impl Tabulated {
    pub fn new(density: GridFunction, tail_rate: f64) -> Result<Self, RenewalError> {
        require(density.singular_exponent().is_none(), "tabulated density must be regular")?;
        require(density.len() >= 3, "tabulated density needs at least three nodes")?;
        require(
            density.samples().iter().all(|v| *v >= 0.0),
            "tabulated density must be nonnegative",
        )?;
        require(
            tail_rate.is_finite() && tail_rate > 0.0,
            format!("tail rate must be positive, got {tail_rate}"),
        )?;
        let cumulative = density.cumulative_integral();
        let last = density.value(density.len() - 1);
        let total = cumulative[cumulative.len() - 1] + last / tail_rate;
        require(
            (total - 1.0).abs() < 1e-3,
            format!("tabulated density integrates to {total}, expected 1"),
        )?;
        Ok(Self {
            density,
            tail_rate,
            cumulative,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        self.density.grid()
    }

    fn locate(&self, tau: f64) -> (usize, f64) {
        let h = self.grid().step();
        let k = ((tau / h).floor() as usize).min(self.density.len() - 2);
        (k, tau / h - k as f64)
    }

    fn mass_beyond_grid(&self) -> f64 {
        self.density.value(self.density.len() - 1) / self.tail_rate
    }
}

impl WaitingTime for Tabulated {
    fn name(&self) -> &'static str {
        "tabulated"
    }

    fn density(&self, tau: f64) -> f64 {
        let span = self.grid().span();
        if tau >= span {
            return self.density.value(self.density.len() - 1) * (-self.tail_rate * (tau - span)).exp();
        }
        let (k, x) = self.locate(tau);
        (1.0 - x) * self.density.value(k) + x * self.density.value(k + 1)
    }

    fn survival(&self, tau: f64) -> f64 {
        let span = self.grid().span();
        if tau >= span {
            return self.mass_beyond_grid() * (-self.tail_rate * (tau - span)).exp();
        }
        let (k, x) = self.locate(tau);
        let h = self.grid().step();
        let (a, b) = (self.density.value(k), self.density.value(k + 1));
        let partial = h * (a * x + 0.5 * (b - a) * x * x);
        let within = self.cumulative[self.cumulative.len() - 1] + self.mass_beyond_grid();
        within - self.cumulative[k] - partial
    }

    fn laplace(&self, u: f64) -> f64 {
        laplace_numeric(&self.density, u, self.tail())
            .map(|l| l.value)
            .unwrap_or(f64::NAN)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let total = self.cumulative[self.cumulative.len() - 1] + self.mass_beyond_grid();
        let target = rng.random::<f64>() * total;
        let on_grid = self.cumulative[self.cumulative.len() - 1];
        if target >= on_grid {
            let rest = (total - target) / self.mass_beyond_grid();
            return self.grid().span() - rest.max(f64::MIN_POSITIVE).ln() / self.tail_rate;
        }
        let k = self.cumulative.partition_point(|c| *c <= target).max(1) - 1;
        let (c0, c1) = (self.cumulative[k], self.cumulative[k + 1]);
        let x = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.grid().time(k) + x * self.grid().step()
    }

    fn mean(&self) -> Option<f64> {
        let t = self.density.multiply(|s| s).ok()?;
        let span = self.grid().span();
        let tail = self.mass_beyond_grid() * (span + 1.0 / self.tail_rate);
        Some(t.integral() + tail)
    }

    fn tail(&self) -> TailModel {
        TailModel::Exponential { rate: self.tail_rate }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// `P₀(τ)` of any waiting time.
pub fn survival(w: &dyn WaitingTime, tau: f64) -> f64 {
    w.survival(tau)
}

/// `K(u)` of any waiting time.
pub fn kernel_laplace(w: &dyn WaitingTime, u: f64) -> f64 {
    w.kernel_laplace(u)
}

/// Draws one interval from `w`.
pub fn sample_interval(w: &dyn WaitingTime, rng: &mut dyn RngCore) -> f64 {
    w.sample(rng)
}

/// `(P_a/(⟨τ⟩γ_a), P_b/(⟨τ⟩γ_b))`, the weights of the fully aged survival.
pub fn biexp_asymptotic_weights(w: &dyn WaitingTime) -> Result<(f64, f64), RenewalError> {
    let b = w
        .as_any()
        .downcast_ref::<BiExponential>()
        .ok_or_else(|| RenewalError::WrongVariant {
            expected: "bi-exponential",
            found: w.name().to_string(),
        })?;
    let mean = b.mean_time();
    Ok((b.weight_a / (mean * b.rate_a), b.weight_b / (mean * b.rate_b)))
}

pub type WaitingTimeFactory = fn(&serde_json::Value) -> Result<Arc<dyn WaitingTime>, RenewalError>;

struct Entry {
    description: &'static str,
    factory: WaitingTimeFactory,
}

/// Name-keyed constructors for waiting-time variants.
pub struct WaitingTimeRegistry {
    entries: BTreeMap<&'static str, Entry>,
}

impl WaitingTimeRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// Registry holding the four built-in variants.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("exponential", "w(τ) = γ e^{−γτ}; params {rate}", build_exponential);
        r.register(
            "bi-exponential",
            "exponential mixture; params {weight_a, rate_a, weight_b, rate_b}",
            build_biexponential,
        );
        r.register(
            "mittag-leffler",
            "fractional, P₀ = E_α(−Aτ^α); params {alpha, amplitude}",
            build_mittag_leffler,
        );
        r.register(
            "tabulated",
            "density on a uniform grid with exponential tail; params {step, density, tail_rate}",
            build_tabulated,
        );
        r
    }

    /// Adds or replaces a variant.
    pub fn register(&mut self, name: &'static str, description: &'static str, factory: WaitingTimeFactory) {
        self.entries.insert(name, Entry { description, factory });
    }

    pub fn build(&self, name: &str, params: &serde_json::Value) -> Result<Arc<dyn WaitingTime>, RenewalError> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| RenewalError::UnknownVariant(name.to_string()))?;
        (entry.factory)(params)
    }

    /// `(name, description)` pairs in name order.
    pub fn describe(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.entries.iter().map(|(k, e)| (*k, e.description))
    }
}

impl Default for WaitingTimeRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

fn parse<T: DeserializeOwned>(params: &serde_json::Value) -> Result<T, RenewalError> {
    serde_json::from_value(params.clone()).map_err(|e| RenewalError::InvalidParameter(e.to_string()))
}

fn build_exponential(params: &serde_json::Value) -> Result<Arc<dyn WaitingTime>, RenewalError> {
    let p: Exponential = parse(params)?;
    Ok(Arc::new(Exponential::new(p.rate)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BiExponentialParams {
    weight_a: f64,
    rate_a: f64,
    weight_b: f64,
    rate_b: f64,
}

fn build_biexponential(params: &serde_json::Value) -> Result<Arc<dyn WaitingTime>, RenewalError> {
    let p: BiExponentialParams = parse(params)?;
    Ok(Arc::new(BiExponential::new(p.weight_a, p.rate_a, p.weight_b, p.rate_b)?))
}

fn build_mittag_leffler(params: &serde_json::Value) -> Result<Arc<dyn WaitingTime>, RenewalError> {
    let p: MittagLeffler = parse(params)?;
    Ok(Arc::new(MittagLeffler::new(p.alpha, p.amplitude)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TabulatedParams {
    step: f64,
    density: Vec<f64>,
    tail_rate: f64,
}

fn build_tabulated(params: &serde_json::Value) -> Result<Arc<dyn WaitingTime>, RenewalError> {
    let p: TabulatedParams = parse(params)?;
    let grid = TimeGrid::new(p.step, p.density.len())?;
    Ok(Arc::new(Tabulated::new(GridFunction::new(grid, p.density)?, p.tail_rate)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn survival_examples() {
        let e = Exponential::new(1.0).unwrap();
        assert_relative_eq!(survival(&e, 1.0), (-1.0f64).exp(), max_relative = 1e-15);
        let ml = MittagLeffler::new(0.5, 0.5).unwrap();
        assert_relative_eq!(survival(&ml, 4.0), 0.427_583_576_155_807, max_relative = 1e-12);
        let b = BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap();
        assert_eq!(survival(&b, 0.0), 1.0);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_laplace(&Exponential::new(1.0).unwrap(), 3.0), 1.0);
        assert_relative_eq!(
            kernel_laplace(&MittagLeffler::new(0.5, 1.0).unwrap(), 4.0),
            2.0,
            max_relative = 1e-15
        );
        let b = BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap();
        let w = 0.8 * 0.5 + 0.2 * 0.05 / 1.05;
        assert_relative_eq!(kernel_laplace(&b, 1.0), w / (1.0 - w), max_relative = 1e-14);
        assert_relative_eq!(kernel_laplace(&b, 1.0), 0.693_548, max_relative = 1e-5);
    }

    #[test]
    fn biexponential_renormalizes() {
        let b = BiExponential::new(0.99, 1.0, 1e-3, 0.01).unwrap();
        assert!(b.was_renormalized());
        assert_relative_eq!(b.weight_a + b.weight_b, 1.0, max_relative = 1e-15);
        assert!(!BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap().was_renormalized());
    }

    #[test]
    fn asymptotic_weights() {
        let b = BiExponential::new(0.8, 1.0, 0.2, 0.05).unwrap();
        let (a, c) = biexp_asymptotic_weights(&b).unwrap();
        assert_relative_eq!(a, 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(c, 5.0 / 6.0, max_relative = 1e-14);
        let single = BiExponential::new(1.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(biexp_asymptotic_weights(&single).unwrap(), (1.0, 0.0));
        let same = BiExponential::new(0.3, 2.0, 0.7, 2.0).unwrap();
        let (a, c) = biexp_asymptotic_weights(&same).unwrap();
        assert_relative_eq!(a, 0.3, max_relative = 1e-14);
        assert_relative_eq!(c, 0.7, max_relative = 1e-14);
        assert!(biexp_asymptotic_weights(&Exponential::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn registry_builds_by_name() {
        let r = WaitingTimeRegistry::with_builtins();
        let w = r
            .build("mittag-leffler", &serde_json::json!({"alpha": 0.5, "amplitude": 1.0}))
            .unwrap();
        assert_eq!(w.name(), "mittag-leffler");
        assert!(w.as_any().downcast_ref::<MittagLeffler>().is_some());
        assert!(matches!(
            r.build("gamma", &serde_json::json!({})),
            Err(RenewalError::UnknownVariant(_))
        ));
        assert!(r
            .build("exponential", &serde_json::json!({"rate": 1.0, "extra": 2}))
            .is_err());
        assert!(r.build("exponential", &serde_json::json!({"rate": -1.0})).is_err());
        assert_eq!(r.describe().count(), 4);
    }

    #[test]
    fn tabulated_matches_exponential() {
        let g = TimeGrid::with_span(0.01, 10.0).unwrap();
        let d = GridFunction::from_fn(g, |t| (-t).exp(), None).unwrap();
        let tab = Tabulated::new(d, 1.0).unwrap();
        for tau in [0.0, 0.5, 3.333, 10.0, 14.0] {
            assert_relative_eq!(tab.survival(tau), (-tau).exp(), max_relative = 1e-4);
            assert_relative_eq!(tab.density(tau), (-tau).exp(), max_relative = 1e-4);
        }
        assert_relative_eq!(tab.laplace(1.0), 0.5, max_relative = 1e-6);
        assert_relative_eq!(tab.mean().unwrap(), 1.0, max_relative = 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let mean = (0..n).map(|_| tab.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn mittag_leffler_unit_order_is_exponential() {
        let ml = MittagLeffler::new(1.0, 2.0).unwrap();
        let e = Exponential::new(2.0).unwrap();
        for tau in [0.0, 0.3, 2.0] {
            assert_relative_eq!(ml.density(tau), e.density(tau), max_relative = 1e-14);
            assert_relative_eq!(ml.survival(tau), e.survival(tau), max_relative = 1e-14);
        }
        assert!(WaitingTime::singularity(&ml).is_none());
    }
}
