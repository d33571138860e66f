// SPDX-License-Identifier: Apache-2.0

//! Mittag-Leffler functions on the negative real axis and incomplete Beta.

use super::quad::integrate_with_breaks;
use std::f64::consts::PI;

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Below this argument magnitude the power series is summed directly.
const SERIES_LIMIT: f64 = 1.0;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `Σ_k (−x)^k / Γ(αk + β)` for moderate `x ≥ 0`.
fn series(alpha: f64, beta: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0 / gamma(beta);
    }
    let lx = x.ln();
    let mut acc = CompensatedSum::default();
    for k in 0..10_000usize {
        let kf = k as f64;
        let mag = (kf * lx - ln_gamma(alpha * kf + beta)).exp();
        let term = if k % 2 == 0 { mag } else { -mag };
        acc.add(term);
        if k > 4 && mag < 1e-18 * acc.value().abs().max(1e-300) {
            break;
        }
    }
    acc.value()
}

/// Integral representation shared by `E_α(−x)` and `E_{α,α}(−x)`:
/// `(sin απ / απ) ∫₀^∞ e^{−v^{1/α}} g(v) / ((v + x cos απ)² + (x sin απ)²) dv`.
fn spectral_integral(alpha: f64, x: f64, numerator: impl Fn(f64) -> f64) -> f64 {
    let s = (alpha * PI).sin();
    let c = (alpha * PI).cos();
    let inv = 1.0 / alpha;
    let upper = 745f64.powf(alpha);
    let integrand = |v: f64| {
        let d = (v + x * c).powi(2) + (x * s).powi(2);
        (-v.powf(inv)).exp() * numerator(v) / d
    };
    let mut breaks = vec![0.0];
    let peak = -x * c;
    if peak > 0.0 && peak < upper {
        let width = x * s;
        for p in [peak - 4.0 * width, peak, peak + 4.0 * width] {
            if p > 0.0 && p < upper {
                breaks.push(p);
            }
        }
    }
    breaks.push(upper);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    let samples = 256;
    let dv = upper / samples as f64;
    let rough: f64 = (0..samples)
        .map(|i| dv * integrand((i as f64 + 0.5) * dv).abs())
        .sum::<f64>()
        .max(integrand(peak.max(0.0)).abs() * 1e-3);
    let tol = 1e-14 * rough.max(1e-300);
    let value = integrate_with_breaks(integrand, &breaks, tol);
    s / (alpha * PI) * value
}

fn check_alpha(alpha: f64) {
    assert!(
        alpha > 0.0 && alpha <= 1.0,
        "Mittag-Leffler order must lie in (0, 1], got {alpha}"
    );
}

/// `E_α(x)` for `0 < α ≤ 1` and `x ≤ 0`.
pub fn mittag_leffler(alpha: f64, x: f64) -> f64 {
    check_alpha(alpha);
    assert!(x <= 0.0, "argument must be nonpositive, got {x}");
    let y = -x;
    if alpha == 1.0 {
        return (-y).exp();
    }
    if y == 0.0 {
        return 1.0;
    }
    if y <= SERIES_LIMIT {
        return series(alpha, 1.0, y);
    }
    spectral_integral(alpha, y, |_| y)
}

/// Two-parameter `E_{α,α}(x)` for `0 < α ≤ 1` and `x ≤ 0`; the derivative
/// form entering the fractional waiting-time density.
pub fn mittag_leffler_aa(alpha: f64, x: f64) -> f64 {
    check_alpha(alpha);
    assert!(x <= 0.0, "argument must be nonpositive, got {x}");
    let y = -x;
    if alpha == 1.0 {
        return (-y).exp();
    }
    if y <= SERIES_LIMIT {
        return series(alpha, alpha, y);
    }
    let inv = 1.0 / alpha;
    spectral_integral(alpha, y, |v| v.powf(inv))
}

/// Power series `Σ_k x^k / Γ(αk + β)`, exposed for arbitrary `β`.
pub fn mittag_leffler_series(alpha: f64, beta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        series(alpha, beta, -x)
    } else {
        let mut acc = CompensatedSum::default();
        let lx = x.ln();
        for k in 0..10_000usize {
            let kf = k as f64;
            let term = (kf * lx - ln_gamma(alpha * kf + beta)).exp();
            acc.add(term);
            if k > 4 && term < 1e-18 * acc.value() {
                break;
            }
        }
        acc.value()
    }
}

/// Lower incomplete Beta `∫₀^x s^{a−1}(1−s)^{b−1} ds` (not regularized).
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1], got {x}");
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    if x == 0.0 {
        return 0.0;
    }
    statrs::function::beta::beta_inc(a, b, x)
}
