// SPDX-License-Identifier: Apache-2.0

//! Uniform grids, sampled functions with weak singularities at the origin,
//! and product-integration quadrature built on them.

use super::NumericsError;
use statrs::function::beta::beta;
use std::cell::RefCell;
use std::rc::Rc;

/// Panels whose left edge sits closer than this many steps to a singular
/// point use product-integration weights; farther panels use Simpson weights.
const MOMENT_PANEL_REACH: usize = 48;
/// Below this many steps the panel weights come from closed-form moments,
/// beyond it from Gauss–Legendre quadrature of the weight.
const CLOSED_FORM_REACH: usize = 2;
/// Interpolation nodes per near-origin cell.
const NEAR_NODES: usize = 5;
/// Intervals with two non-smooth endpoints up to this many cells use the
/// two-sided rule.
const TWO_SIDED_LIMIT: usize = 64;

/// Uniform time grid `t_k = k·step`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    step: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(step: f64, count: usize) -> Result<Self, NumericsError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(NumericsError::InvalidArgument(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if count == 0 {
            return Err(NumericsError::InvalidArgument(
                "grid needs at least one point".into(),
            ));
        }
        Ok(Self { step, count })
    }

    /// Grid covering `[0, span]` with the given step.
    pub fn with_span(step: f64, span: f64) -> Result<Self, NumericsError> {
        if !(span.is_finite() && span >= 0.0) {
            return Err(NumericsError::InvalidArgument(format!(
                "grid span must be nonnegative, got {span}"
            )));
        }
        let cells = (span / step).round();
        if ((cells * step) - span).abs() > 1e-9 * span.max(1.0) {
            return Err(NumericsError::InvalidArgument(format!(
                "span {span} is not a multiple of step {step}"
            )));
        }
        Self::new(step, cells as usize + 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn span(&self) -> f64 {
        (self.count - 1) as f64 * self.step
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.time(k))
    }

    /// Index of an on-grid time, if it lies on a node within the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        if !(t.is_finite() && t >= 0.0) {
            return None;
        }
        let k = (t / self.step).round();
        if (k * self.step - t).abs() > 1e-9 * t.max(self.step) {
            return None;
        }
        let k = k as usize;
        (k < self.count).then_some(k)
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.count == other.count && (self.step - other.step).abs() <= 1e-15 * self.step
    }
}

/// Function sampled on a [`TimeGrid`].
///
/// With a singular exponent `β ∈ (−1, 0)` the function behaves like `t^β`
/// near the origin and `samples[0]` holds the finite coefficient
/// `lim_{t→0} t^{−β} g(t)` instead of a (divergent) value.
///
/// A fractional order `α ∈ (0, 1)` declares that the regular part is a
/// smooth function of `t^α` rather than of `t`; quadrature next to the
/// origin then interpolates in powers of `t^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: TimeGrid,
    samples: Vec<f64>,
    singular_exponent: Option<f64>,
    fractional_order: Option<f64>,
    regular: Vec<f64>,
}

/// Behaviour of a grid function at its origin: `t^exponent R(t^order)`
/// with `R` smooth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Origin {
    pub exponent: f64,
    pub order: f64,
}

impl Origin {
    pub const PLAIN: Origin = Origin { exponent: 0.0, order: 1.0 };

    pub fn is_plain(&self) -> bool {
        self.exponent == 0.0 && self.order == 1.0
    }

    /// Substitution power that smooths `s^exponent R(s^order)` near `s = 0`.
    fn grading(&self) -> f64 {
        if self.order < 1.0 {
            1.0 / self.order
        } else {
            1.0 / (1.0 + self.exponent)
        }
    }
}

impl GridFunction {
    pub fn new(grid: TimeGrid, samples: Vec<f64>) -> Result<Self, NumericsError> {
        Self::with_singularity(grid, samples, None)
    }

    pub fn with_singularity(
        grid: TimeGrid,
        samples: Vec<f64>,
        singular_exponent: Option<f64>,
    ) -> Result<Self, NumericsError> {
        if samples.len() != grid.count() {
            return Err(NumericsError::GridMismatch {
                expected: grid.count(),
                found: samples.len(),
            });
        }
        if let Some(b) = singular_exponent {
            if !(b > -1.0 && b <= 0.0) {
                return Err(NumericsError::InvalidArgument(format!(
                    "singular exponent {b} outside (-1, 0]"
                )));
            }
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::InvalidArgument(format!(
                "sample {k} is not finite"
            )));
        }
        let singular_exponent = singular_exponent.filter(|b| *b != 0.0);
        let mut f = Self {
            grid,
            samples,
            singular_exponent,
            fractional_order: None,
            regular: Vec::new(),
        };
        f.refresh_regular();
        Ok(f)
    }

    /// Samples `g(t_k)` from a closure; with a singular exponent the
    /// regular-part closure supplies the coefficient at the origin.
    pub fn from_fn(
        grid: TimeGrid,
        value: impl Fn(f64) -> f64,
        singular: Option<(f64, f64)>,
    ) -> Result<Self, NumericsError> {
        let mut samples: Vec<f64> = Vec::with_capacity(grid.count());
        for k in 0..grid.count() {
            if k == 0 {
                if let Some((_, coeff)) = singular {
                    samples.push(coeff);
                    continue;
                }
            }
            samples.push(value(grid.time(k)));
        }
        Self::with_singularity(grid, samples, singular.map(|s| s.0))
    }

    fn refresh_regular(&mut self) {
        self.regular = match self.singular_exponent {
            None => Vec::new(),
            Some(b) => {
                let h = self.grid.step();
                self.samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| if k == 0 { *v } else { v / (k as f64 * h).powf(b) })
                    .collect()
            }
        };
    }

    /// Declares the regular part smooth in `t^order`; an order of one
    /// clears the declaration.
    pub fn with_fractional_order(mut self, order: Option<f64>) -> Result<Self, NumericsError> {
        if let Some(a) = order {
            if !(a > 0.0 && a <= 1.0) {
                return Err(NumericsError::InvalidArgument(format!(
                    "fractional order {a} outside (0, 1]"
                )));
            }
        }
        self.fractional_order = order.filter(|a| *a != 1.0);
        Ok(self)
    }

    pub fn fractional_order(&self) -> Option<f64> {
        self.fractional_order
    }

    pub(crate) fn origin(&self) -> Origin {
        Origin {
            exponent: self.singular_exponent.unwrap_or(0.0),
            order: self.fractional_order.unwrap_or(1.0),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn singular_exponent(&self) -> Option<f64> {
        self.singular_exponent
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Value at node `k`; for singular functions only valid for `k ≥ 1`.
    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.samples[k]
    }

    /// `t^{−β} g(t)` at node `k`, or the plain value when regular.
    #[inline]
    pub fn regular_part(&self, k: usize) -> f64 {
        match self.singular_exponent {
            None => self.samples[k],
            Some(_) => self.regular[k],
        }
    }

    pub(crate) fn set_sample(&mut self, k: usize, v: f64) {
        self.samples[k] = v;
        if let Some(b) = self.singular_exponent {
            self.regular[k] = if k == 0 {
                v
            } else {
                v / (k as f64 * self.grid.step()).powf(b)
            };
        }
    }

    pub fn truncated(&self, count: usize) -> Result<Self, NumericsError> {
        let count = count.min(self.len());
        Self::with_singularity(
            TimeGrid::new(self.grid.step(), count)?,
            self.samples[..count].to_vec(),
            self.singular_exponent,
        )?
        .with_fractional_order(self.fractional_order)
    }

    /// Pointwise product with a smooth function sampled on the same grid.
    pub fn multiply(&self, factor: impl Fn(f64) -> f64) -> Result<Self, NumericsError> {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, v)| v * factor(self.grid.time(k)))
            .collect();
        Self::with_singularity(self.grid, samples, self.singular_exponent)?
            .with_fractional_order(self.fractional_order)
    }

    /// `∫₀^{t_k} g` for every `k`, with the singular weight integrated exactly.
    pub fn cumulative_integral(&self) -> Vec<f64> {
        let n = self.len();
        let h = self.grid.step();
        let mut out = vec![0.0; n];
        if n < 2 {
            return out;
        }
        let origin = self.origin();
        let weights = (!origin.is_plain() && n >= NEAR_NODES).then(|| panel_weights(origin));
        let scale = h.powf(origin.exponent + 1.0);
        let r = |i: usize| self.regular_part(i);
        if !origin.is_plain() && n < NEAR_NODES {
            for k in 1..n {
                out[k] = scale * short_span(origin, 0, k + 1, r);
            }
            return out;
        }
        let mut acc = 0.0;
        for k in 1..n {
            let c = k - 1;
            let cell = match &weights {
                Some(w) if c < MOMENT_PANEL_REACH => {
                    let st = stencil_start(c, n);
                    let wc = &w.cells[st][c - st];
                    scale * (0..NEAR_NODES).map(|q| wc[q] * r(st + q)).sum::<f64>()
                }
                _ => {
                    let v = |i: usize| self.value(i);
                    if k >= 3 {
                        h * (v(k - 3) - 5.0 * v(k - 2) + 19.0 * v(k - 1) + 9.0 * v(k)) / 24.0
                    } else if n >= 4 && k == 1 {
                        h * (9.0 * v(0) + 19.0 * v(1) - 5.0 * v(2) + v(3)) / 24.0
                    } else if n >= 4 {
                        h * (-v(0) + 13.0 * v(1) + 13.0 * v(2) - v(3)) / 24.0
                    } else if n == 3 {
                        let q = if k == 1 { [5.0, 8.0, -1.0] } else { [-1.0, 8.0, 5.0] };
                        h * (q[0] * v(0) + q[1] * v(1) + q[2] * v(2)) / 12.0
                    } else {
                        0.5 * h * (v(0) + v(1))
                    }
                }
            };
            acc += cell;
            out[k] = acc;
        }
        out
    }

    /// Integral over the whole grid.
    pub fn integral(&self) -> f64 {
        let h = self.grid.step();
        power_weighted_integral(self.len(), h, 0, self.origin(), |i| self.regular_part(i), |i| self.value(i))
    }
}

/// Lagrange basis polynomials through `nodes`, as monomial coefficients
/// `c[r][k]` of `x^k`.
fn lagrange_coefficients<const N: usize>(nodes: [f64; N]) -> [[f64; N]; N] {
    let mut out = [[0.0; N]; N];
    for r in 0..N {
        let mut poly = [0.0; N];
        poly[0] = 1.0;
        let mut deg = 0;
        let mut denom = 1.0;
        for (q, xq) in nodes.iter().enumerate() {
            if q == r {
                continue;
            }
            for k in (0..=deg).rev() {
                poly[k + 1] += poly[k];
                poly[k] *= -xq;
            }
            deg += 1;
            denom *= nodes[r] - xq;
        }
        for k in 0..N {
            out[r][k] = poly[k] / denom;
        }
    }
    out
}

/// Weights `∫_a^b s^β L_r(s^α) ds` for the Lagrange basis `L_r` through
/// `x_q = (j + q)^α`, on unit-step nodes `j, j + 1, …`.
fn basis_weights<const N: usize>(origin: Origin, j: usize, a: f64, b: f64) -> [f64; N] {
    let Origin { exponent: beta, order: alpha } = origin;
    let nodes: [f64; N] = std::array::from_fn(|q| ((j + q) as f64).powf(alpha));
    let mut w = [0.0; N];
    if j < CLOSED_FORM_REACH {
        let coeff = lagrange_coefficients(nodes);
        let moments: [f64; N] = std::array::from_fn(|k| {
            let p = beta + k as f64 * alpha + 1.0;
            (b.powf(p) - a.powf(p)) / p
        });
        for r in 0..N {
            w[r] = (0..N).map(|k| coeff[r][k] * moments[k]).sum();
        }
    } else {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, wt) in gauss_rule(16).iter() {
            let s = mid + half * x;
            let xs = s.powf(alpha);
            let base = half * wt * s.powf(beta);
            for r in 0..N {
                let l: f64 = (0..N)
                    .filter(|q| *q != r)
                    .map(|q| (xs - nodes[q]) / (nodes[r] - nodes[q]))
                    .product();
                w[r] += base * l;
            }
        }
    }
    w
}

/// Product-integration weights for `s^β R(s^α)` near the origin: for
/// `st < MOMENT_PANEL_REACH + NEAR_NODES`, `cells[st][c]` integrates the unit
/// cell `[st + c, st + c + 1]` against the interpolant through the nodes
/// `st..st + NEAR_NODES`, which is polynomial in `s^α`.
struct PanelWeights {
    cells: Vec<[[f64; NEAR_NODES]; NEAR_NODES - 1]>,
}

impl PanelWeights {
    fn build(origin: Origin) -> Self {
        let cells = (0..MOMENT_PANEL_REACH + NEAR_NODES)
            .map(|st| {
                std::array::from_fn(|c| {
                    basis_weights::<NEAR_NODES>(origin, st, (st + c) as f64, (st + c + 1) as f64)
                })
            })
            .collect();
        Self { cells }
    }
}

thread_local! {
    static PANEL_CACHE: RefCell<Vec<((u64, u64), Rc<PanelWeights>)>> = const { RefCell::new(Vec::new()) };
}

fn panel_weights(origin: Origin) -> Rc<PanelWeights> {
    let key = (origin.exponent.to_bits(), origin.order.to_bits());
    PANEL_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some((_, w)) = cache.iter().find(|(k, _)| *k == key) {
            return Rc::clone(w);
        }
        let w = Rc::new(PanelWeights::build(origin));
        if cache.len() >= 64 {
            cache.remove(0);
        }
        cache.push((key, Rc::clone(&w)));
        w
    })
}

/// Weighted integral of the interpolant through all `n < NEAR_NODES` nodes
/// starting `shift` steps from the origin, in unit-step scaling.
fn short_span(origin: Origin, shift: usize, n: usize, regular: impl Fn(usize) -> f64) -> f64 {
    let (a, b) = (shift as f64, (shift + n - 1) as f64);
    let dot = |w: &[f64]| w.iter().enumerate().map(|(q, wq)| wq * regular(q)).sum::<f64>();
    match n {
        2 => dot(&basis_weights::<2>(origin, shift, a, b)),
        3 => dot(&basis_weights::<3>(origin, shift, a, b)),
        4 => dot(&basis_weights::<4>(origin, shift, a, b)),
        _ => unreachable!("short spans have two to four nodes"),
    }
}

/// First node of the near-origin interpolant used on cell `c` of an
/// `n`-node span.
fn stencil_start(c: usize, n: usize) -> usize {
    (c - c % 2).min(n - NEAR_NODES)
}

/// Composite Simpson from node `lo` to node `n − 1` of a smooth integrand,
/// a trailing odd cell closed by the quadratic through the last three nodes.
fn smooth_tail(lo: usize, n: usize, h: f64, full: impl Fn(usize) -> f64) -> f64 {
    let cells = n - 1 - lo;
    if cells == 0 {
        return 0.0;
    }
    if cells == 1 && n < 3 {
        return 0.5 * h * (full(lo) + full(lo + 1));
    }
    let mut acc = 0.0;
    let mut i = lo;
    while i + 2 < n {
        acc += full(i) + 4.0 * full(i + 1) + full(i + 2);
        i += 2;
    }
    acc *= h / 3.0;
    if cells % 2 == 1 {
        let i = n - 3;
        acc += h * (-full(i) + 8.0 * full(i + 1) + 5.0 * full(i + 2)) / 12.0;
    }
    acc
}

/// Gauss–Legendre rule of the given size, computed once per thread.
fn gauss_rule(n: usize) -> Rc<Vec<(f64, f64)>> {
    thread_local! {
        static RULES: RefCell<Vec<(usize, Rc<Vec<(f64, f64)>>)>> = const { RefCell::new(Vec::new()) };
    }
    RULES.with(|rules| {
        let mut rules = rules.borrow_mut();
        if let Some((_, r)) = rules.iter().find(|(k, _)| *k == n) {
            return Rc::clone(r);
        }
        let r = Rc::new(super::quad::gauss_legendre(n));
        rules.push((n, Rc::clone(&r)));
        r
    })
}

/// Product-integration rule for `∫₀^{(n−1)h} (shift·h + s)^β φ(s) ds`.
///
/// `regular(i)` is `φ` at node `i`; `full(i)` is the complete integrand
/// `(shift·h + s_i)^β φ(s_i)` and is only queried on cells away from the
/// origin. Cells near the origin interpolate `φ` through five nodes as a
/// polynomial in `(shift·h + s)^α`; the rest use composite Simpson.
pub(crate) fn power_weighted_integral(
    n: usize,
    h: f64,
    shift: usize,
    origin: Origin,
    regular: impl Fn(usize) -> f64,
    full: impl Fn(usize) -> f64,
) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if origin.is_plain() || shift >= MOMENT_PANEL_REACH {
        return smooth_tail(0, n, h, full);
    }
    let scale = h.powf(origin.exponent + 1.0);
    if n < NEAR_NODES {
        return scale * short_span(origin, shift, n, regular);
    }
    let weights = panel_weights(origin);
    let mut near_end = (MOMENT_PANEL_REACH - shift).min(n - 1);
    if (n - 1 - near_end) % 2 == 1 {
        near_end += 1;
    }
    let mut near_sum = 0.0;
    for c in 0..near_end {
        let st = stencil_start(c, n);
        let w = &weights.cells[shift + st][c - st];
        near_sum += (0..NEAR_NODES).map(|q| w[q] * regular(st + q)).sum::<f64>();
    }
    scale * near_sum + smooth_tail(near_end, n, h, full)
}

/// `∫₀^{mh} φ` for a smooth integrand with node values `phi(i)`, `i = 0..=m`,
/// `m ≥ 2`, by a composite rule whose weights are symmetric under `i ↦ m − i`.
fn palindromic_rule(m: usize, h: f64, phi: impl Fn(usize) -> f64) -> f64 {
    let simpson = |lo: usize, hi: usize| -> f64 {
        (lo..hi)
            .step_by(2)
            .map(|i| phi(i) + 4.0 * phi(i + 1) + phi(i + 2))
            .sum::<f64>()
            * h
            / 3.0
    };
    if m % 2 == 0 {
        return simpson(0, m);
    }
    let l = (m - 1) / 2;
    if l % 2 == 0 {
        simpson(0, l)
            + h * (-phi(l - 1) + 13.0 * phi(l) + 13.0 * phi(l + 1) - phi(l + 2)) / 24.0
            + simpson(l + 1, m)
    } else {
        let i = l - 1;
        simpson(0, i)
            + 3.0 * h * (phi(i) + 3.0 * phi(i + 1) + 3.0 * phi(i + 2) + phi(i + 3)) / 8.0
            + simpson(l + 2, m)
    }
}

/// `∫₀^h G(h − s) K(s) ds` with both factors replaced by their quadratic
/// interpolants through the nodes `0, h, 2h`.
fn first_cell(h: f64, g: [f64; 3], k: [f64; 3]) -> f64 {
    let basis = |x: f64| [(x - 1.0) * (x - 2.0) / 2.0, x * (2.0 - x), x * (x - 1.0) / 2.0];
    let mut acc = 0.0;
    for (x, wt) in super::quad::gauss_legendre(3) {
        let y = 0.5 + 0.5 * x;
        let (bg, bk) = (basis(1.0 - y), basis(y));
        let gv: f64 = (0..3).map(|i| bg[i] * g[i]).sum();
        let kv: f64 = (0..3).map(|i| bk[i] * k[i]).sum();
        acc += 0.5 * wt * gv * kv;
    }
    h * acc
}

/// Value at unit-step position `pos` of the piecewise interpolant in
/// `pos^α` through the samples `value(lo..=hi)`, using up to
/// [`NEAR_NODES`] nodes with stencils counted from the origin.
fn interpolate(order: f64, lo: usize, hi: usize, pos: f64, value: impl Fn(usize) -> f64) -> f64 {
    let coord = |x: f64| if order == 1.0 { x } else { x.powf(order) };
    let x = coord(pos);
    let count = (hi - lo + 1).min(NEAR_NODES);
    let cell = pos.max(0.0) as usize;
    let start = (cell - cell % 2).clamp(lo, hi + 1 - count);
    let mut acc = 0.0;
    for r in 0..count {
        let xr = coord((start + r) as f64);
        let mut l = 1.0;
        for q in 0..count {
            if q != r {
                let xq = coord((start + q) as f64);
                l *= (x - xq) / (xr - xq);
            }
        }
        acc += l * value(start + r);
    }
    acc
}

/// `∫₀^{mh} s^{βk} (L − s)^{βg} K(s) G(L − s) ds` with `L = (shift + m)h`,
/// for short intervals next to a non-smooth origin. The regular parts are
/// interpolated from the grid, reaching past the interval when it has fewer
/// than [`NEAR_NODES`] nodes; cells touching an origin are integrated after
/// a graded substitution.
fn two_sided_rule(g: &GridFunction, k: &GridFunction, shift: usize, m: usize, ko: Origin, go: Origin) -> f64 {
    let h = g.grid().step();
    let reach = NEAR_NODES - 1;
    let k_hi = (k.len() - 1).min(m.max(reach));
    let g_hi = (g.len() - 1).min((shift + m).max(reach));
    let end = (shift + m) as f64;
    let integrand = |s: f64| {
        let u = end - s;
        let kr = interpolate(ko.order, 0, k_hi, s, |i| k.regular_part(i));
        let gr = interpolate(go.order, 0, g_hi, u, |r| g.regular_part(r));
        s.powf(ko.exponent) * u.powf(go.exponent) * kr * gr
    };
    let plain = |a: f64, b: f64| -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        gauss_rule(8).iter().map(|&(x, w)| half * w * integrand(mid + half * x)).sum()
    };
    // ∫ over a cell of width `width` touching an origin, with the distance
    // from that origin graded as width·y^p
    let graded = |width: f64, p: f64, place: &dyn Fn(f64) -> f64| -> f64 {
        gauss_rule(16)
            .iter()
            .map(|&(x, w)| {
                let y = 0.5 + 0.5 * x;
                let d = width * y.powf(p);
                0.5 * w * width * p * y.powf(p - 1.0) * integrand(place(d))
            })
            .sum()
    };
    let from_k = |d: f64| d;
    let from_g = |d: f64| end - d;
    let mf = m as f64;
    let mut acc = 0.0;
    if m == 1 && shift == 0 {
        acc += graded(0.5, ko.grading(), &from_k) + graded(0.5, go.grading(), &from_g);
    } else {
        acc += graded(1.0, ko.grading(), &from_k);
        for c in 1..m - 1 {
            acc += plain(c as f64, (c + 1) as f64);
        }
        if m > 1 {
            acc += if shift == 0 {
                graded(1.0, go.grading(), &from_g)
            } else {
                plain(mf - 1.0, mf)
            };
        }
    }
    acc * h.powf(1.0 + ko.exponent + go.exponent)
}

/// `∫₀^{m h} g(shift·h + m h − s) k(s) ds` for grid functions `g`, `k` that
/// may both carry an integrable singularity at their origin.
///
/// With one singular factor the whole interval is integrated against its
/// power weight. With two, short intervals use the two-sided weight and
/// longer ones are split at the midpoint so each half carries one weight.
/// Every branch is mirror-symmetric, so the unshifted rule is commutative.
pub(crate) fn shifted_product(g: &GridFunction, k: &GridFunction, shift: usize, m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let h = g.grid().step();
    let ko = k.origin();
    let go = if shift < MOMENT_PANEL_REACH { g.origin() } else { Origin::PLAIN };
    let from_k = |len: usize| {
        power_weighted_integral(
            len + 1,
            h,
            0,
            ko,
            |i| g.value(shift + m - i) * k.regular_part(i),
            |i| g.value(shift + m - i) * k.value(i),
        )
    };
    let from_g = |len: usize| {
        power_weighted_integral(
            len + 1,
            h,
            shift,
            go,
            |i| g.regular_part(shift + i) * k.value(m - i),
            |i| g.value(shift + i) * k.value(m - i),
        )
    };
    match (!ko.is_plain(), !go.is_plain()) {
        (false, false) => {
            if m == 1 {
                if k.len() > 2 && g.len() > shift + 2 {
                    let gv = [g.value(shift), g.value(shift + 1), g.value(shift + 2)];
                    return first_cell(h, gv, [k.value(0), k.value(1), k.value(2)]);
                }
                return 0.5 * h * (g.value(shift + 1) * k.value(0) + g.value(shift) * k.value(1));
            }
            palindromic_rule(m, h, |i| g.value(shift + m - i) * k.value(i))
        }
        _ if m < NEAR_NODES - 1 => two_sided_rule(g, k, shift, m, ko, go),
        (true, false) => from_k(m),
        (false, true) => from_g(m),
        (true, true) if m <= TWO_SIDED_LIMIT => two_sided_rule(g, k, shift, m, ko, go),
        (true, true) => {
            let a = m / 2;
            let mut total = from_k(a) + from_g(a);
            if m % 2 == 1 {
                let prod = |i: usize| g.value(shift + m - i) * k.value(i);
                total += h * (-prod(a - 1) + 13.0 * prod(a) + 13.0 * prod(a + 1) - prod(a + 2)) / 24.0;
            }
            total
        }
    }
}

/// Singular exponent and origin coefficient of `f ∗ g` for singular inputs.
pub(crate) fn convolution_singularity(f: &GridFunction, g: &GridFunction) -> (Option<f64>, f64) {
    match (f.singular_exponent(), g.singular_exponent()) {
        (Some(bf), Some(bg)) => {
            let b = bf + bg + 1.0;
            let coeff = f.regular_part(0) * g.regular_part(0) * beta(bf + 1.0, bg + 1.0);
            if b < 0.0 {
                (Some(b), coeff)
            } else if b == 0.0 {
                (None, coeff)
            } else {
                (None, 0.0)
            }
        }
        _ => (None, 0.0),
    }
}

/// `(f ∗ g)(t_k) = ∫₀^{t_k} f(t_k − s) g(s) ds` on the shared grid.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction, NumericsError> {
    if !f.grid().same_as(g.grid()) {
        return Err(NumericsError::GridMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    let (exponent, origin) = convolution_singularity(f, g);
    let samples: Vec<f64> = (0..f.len())
        .map(|k| if k == 0 { origin } else { shifted_product(f, g, 0, k) })
        .collect();
    let order = match (f.fractional_order(), g.fractional_order()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    GridFunction::with_singularity(*f.grid(), samples, exponent)?.with_fractional_order(order)
}
