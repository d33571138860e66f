// SPDX-License-Identifier: Apache-2.0

use super::grid::{power_weighted_integral, GridFunction};
use super::NumericsError;

/// Model for the part of `f` beyond the end of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// Truncate at the end of the grid.
    None,
    /// `f(τ) ≈ f(T) e^{−rate (τ − T)}`; a zero rate continues `f` as a constant.
    Exponential { rate: f64 },
    /// `f(τ) ≈ f(T) (τ/T)^{−exponent}`, integrated to leading order.
    PowerLaw { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub value: f64,
    /// Contribution of the tail model (zero for [`TailModel::None`]).
    pub tail: f64,
    /// Set when `e^{−uT}|f(T)|` exceeds the truncation tolerance and no tail
    /// model absorbed it.
    pub truncation_warning: bool,
}

/// Truncation tolerance for the boundary term `e^{−uT}|f(T)|`.
pub const TRUNCATION_TOL: f64 = 1e-10;

/// `∫₀^∞ e^{−uτ} f(τ) dτ` from grid samples plus a tail estimate.
pub fn laplace_numeric(f: &GridFunction, u: f64, tail: TailModel) -> Result<LaplaceEstimate, NumericsError> {
    if !(u.is_finite() && u > 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "Laplace argument must be positive, got {u}"
        )));
    }
    let g = f.grid();
    let h = g.step();
    let n = f.len();
    let body = power_weighted_integral(
        n,
        h,
        0,
        f.origin(),
        |i| (-u * g.time(i)).exp() * f.regular_part(i),
        |i| (-u * g.time(i)).exp() * f.value(i),
    );
    let end = g.span();
    let boundary = (-u * end).exp() * f.value(n - 1);
    let tail_value = match tail {
        TailModel::None => 0.0,
        TailModel::Exponential { rate } => boundary / (u + rate),
        TailModel::PowerLaw { exponent } => boundary / (u + exponent / end.max(h)),
    };
    let truncation_warning = matches!(tail, TailModel::None) && boundary.abs() > TRUNCATION_TOL;
    if truncation_warning {
        log::warn!(
            "Laplace transform at u = {u} truncated with boundary term {:.3e}",
            boundary.abs()
        );
    }
    Ok(LaplaceEstimate {
        value: body + tail_value,
        tail: tail_value,
        truncation_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::TimeGrid;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_transform() {
        let g = TimeGrid::with_span(0.01, 40.0).unwrap();
        let f = GridFunction::from_fn(g, |t| (-t).exp(), None).unwrap();
        let l = laplace_numeric(&f, 1.0, TailModel::None).unwrap();
        assert_relative_eq!(l.value, 0.5, max_relative = 1e-6);
        assert!(!l.truncation_warning);
    }

    #[test]
    fn biexponential_transform() {
        let g = TimeGrid::with_span(0.01, 60.0).unwrap();
        let f = GridFunction::from_fn(
            g,
            |t| 0.8 * (-t).exp() + 0.2 * 0.05 * (-0.05 * t).exp(),
            None,
        )
        .unwrap();
        let l = laplace_numeric(&f, 1.0, TailModel::Exponential { rate: 0.05 }).unwrap();
        let exact = 0.8 * 0.5 + 0.2 * (0.05 / 1.05);
        assert_relative_eq!(l.value, exact, max_relative = 1e-6);
        assert_relative_eq!(exact, 0.409_524, max_relative = 1e-6);
    }

    #[test]
    fn constant_with_tail() {
        let g = TimeGrid::with_span(0.01, 5.0).unwrap();
        let f = GridFunction::from_fn(g, |_| 1.0, None).unwrap();
        let l = laplace_numeric(&f, 2.0, TailModel::Exponential { rate: 0.0 }).unwrap();
        assert_relative_eq!(l.value, 0.5, max_relative = 1e-8);
        let bare = laplace_numeric(&f, 2.0, TailModel::None).unwrap();
        assert!(bare.truncation_warning);
    }

    #[test]
    fn singular_integrand() {
        // ∫ t^{-1/2} e^{-ut} dt = √(π/u)
        let g = TimeGrid::with_span(0.01, 40.0).unwrap();
        let f = GridFunction::from_fn(g, |t| t.powf(-0.5), Some((-0.5, 1.0))).unwrap();
        let l = laplace_numeric(&f, 2.0, TailModel::None).unwrap();
        assert_relative_eq!(l.value, (std::f64::consts::PI / 2.0).sqrt(), max_relative = 1e-7);
    }

    #[test]
    fn rejects_nonpositive_argument() {
        let g = TimeGrid::with_span(0.1, 1.0).unwrap();
        let f = GridFunction::from_fn(g, |_| 1.0, None).unwrap();
        assert!(laplace_numeric(&f, 0.0, TailModel::None).is_err());
    }
}
