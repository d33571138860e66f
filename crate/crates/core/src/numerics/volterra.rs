// SPDX-License-Identifier: Apache-2.0

use super::grid::{shifted_product, GridFunction};
use super::NumericsError;

/// Nodes read by the quadrature of the first cells.
const STARTUP_NODES: usize = 4;

/// Solves the renewal equation `f = w + w ∗ f` by marching on the grid of `w`.
///
/// The discretization is the same product-integration rule used by
/// [`convolve`](super::convolve), so the discrete residual vanishes up to
/// rounding. A singular `w ~ t^β` yields `f ~ t^β` with the same coefficient.
pub fn solve_renewal(w: &GridFunction) -> Result<GridFunction, NumericsError> {
    let n = w.len();
    if let Some(k) = w.samples().iter().skip(1).position(|v| *v < 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "waiting-time density is negative at node {}",
            k + 1
        )));
    }
    let total = w.integral();
    if total > 1.0 + 1e-6 {
        return Err(NumericsError::InvalidArgument(format!(
            "waiting-time density integrates to {total} > 1"
        )));
    }
    let mut f = GridFunction::with_singularity(*w.grid(), vec![0.0; n], w.singular_exponent())?
        .with_fractional_order(w.fractional_order())?;
    // f ~ w at the origin, including the singular coefficient
    let f0 = w.samples()[0];
    f.set_sample(0, f0);
    for k in 1..n {
        solve_node(w, &mut f, k)?;
        if k == STARTUP_NODES || (k == n - 1 && k < STARTUP_NODES) {
            // rules for the first cells read a few nodes ahead, so settle
            // the starting nodes jointly
            for _ in 0..6 {
                for j in 1..=k {
                    solve_node(w, &mut f, j)?;
                }
            }
        }
    }
    Ok(f)
}

fn solve_node(w: &GridFunction, f: &mut GridFunction, k: usize) -> Result<(), NumericsError> {
    f.set_sample(k, 0.0);
    let rest = shifted_product(w, f, 0, k);
    f.set_sample(k, 1.0);
    let coeff = shifted_product(w, f, 0, k) - rest;
    let denom = 1.0 - coeff;
    if !(denom > 0.05) {
        return Err(NumericsError::NonConvergence {
            node: k,
            detail: format!("diagonal weight {coeff:.3} too large; refine the step"),
        });
    }
    let v = (w.value(k) + rest) / denom;
    if !v.is_finite() {
        return Err(NumericsError::NonConvergence {
            node: k,
            detail: "non-finite iterate".into(),
        });
    }
    f.set_sample(k, v);
    Ok(())
}

/// Largest `|f − w − w∗f|` over nodes `k ≥ 1`.
pub fn renewal_residual(w: &GridFunction, f: &GridFunction) -> Result<f64, NumericsError> {
    let wf = super::convolve(w, f)?;
    Ok((1..w.len())
        .map(|k| (f.value(k) - w.value(k) - wf.value(k)).abs())
        .fold(0.0, f64::max))
}
