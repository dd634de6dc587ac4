//! Derivative-based bounds on the Hermite–Hadamard refinement gaps and their
//! specializations to the weighted logarithmic and identric means.

use crate::chain::GapBoundReport;
use crate::convex::{ConvexFn, DerivBounds};
use crate::error::{Error, Result};
use crate::hh::{c_fv, r1, r2};
use crate::means::{geom_raw, lerp, ln_wgt_identric, wgt_log_mean, PositivePair, Weight};
use crate::quad::{integrate, QuadConfig};

/// Default tolerance for the sandwich checks, relative to the operand scale.
pub const BOUND_TOL: f64 = 1e-9;

/// Inflation applied to sampled derivative bounds.
pub const SAMPLE_INFLATION: f64 = 0.01;

fn oriented(a: f64, b: f64) -> Result<()> {
    if a < b {
        Ok(())
    } else {
        Err(Error::Orientation { a, b })
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn average(f: &ConvexFn, a: f64, b: f64, q: &QuadConfig) -> Result<f64> {
    Ok(integrate(|x| f.eval(x), a, b, q)?.value / (b - a))
}

/// `(m/3)((b-a)/2)² <= (f(a)+f(b))/2 - avg f <= (M/3)((b-a)/2)²`.
pub fn hh_trapezoid_bounds(f: &ConvexFn, a: f64, b: f64, q: &QuadConfig) -> Result<GapBoundReport> {
    oriented(a, b)?;
    f.check_interval(a, b)?;
    let (m, big_m) = f.bounds().curvature()?;
    let avg = average(f, a, b, q)?;
    let ends = 0.5 * (f.eval(a) + f.eval(b));
    let h2 = (0.5 * (b - a)).powi(2);
    Ok(GapBoundReport::new(
        "trapezoid",
        ends - avg,
        m / 3.0 * h2,
        big_m / 3.0 * h2,
        max_abs(&[ends, avg]),
        BOUND_TOL,
    ))
}

/// `(m/6)((b-a)/2)² <= avg f - f((a+b)/2) <= (M/6)((b-a)/2)²`.
pub fn hh_midpoint_bounds(f: &ConvexFn, a: f64, b: f64, q: &QuadConfig) -> Result<GapBoundReport> {
    oriented(a, b)?;
    f.check_interval(a, b)?;
    let (m, big_m) = f.bounds().curvature()?;
    let avg = average(f, a, b, q)?;
    let mid = f.eval(0.5 * (a + b));
    let h2 = (0.5 * (b - a)).powi(2);
    Ok(GapBoundReport::new(
        "midpoint",
        avg - mid,
        m / 6.0 * h2,
        big_m / 6.0 * h2,
        max_abs(&[avg, mid]),
        BOUND_TOL,
    ))
}

/// The two refinement gaps `C - R⁽¹⁾` and `R⁽²⁾ - C` with their scale.
fn refinement_gaps(f: &ConvexFn, a: f64, b: f64, w: Weight, q: &QuadConfig) -> Result<(f64, f64, f64)> {
    let c = c_fv(f, a, b, w, q)?;
    let lo = r1(f, a, b, w);
    let hi = r2(f, a, b, w);
    Ok((c - lo, hi - c, max_abs(&[c, lo, hi])))
}

fn interior(w: Weight) -> Result<()> {
    if w.is_interior() {
        Ok(())
    } else {
        Err(Error::InvalidWeight(w.value()))
    }
}

/// Upper bounds `v(1-v)K(b-a)/2` on both refinement gaps, for `|f'| <= K`.
pub fn thm32_gaps(f: &ConvexFn, a: f64, b: f64, w: Weight, q: &QuadConfig) -> Result<(GapBoundReport, GapBoundReport)> {
    oriented(a, b)?;
    interior(w)?;
    f.check_interval(a, b)?;
    let k = f.bounds().slope()?;
    let (lower_gap, upper_gap, scale) = refinement_gaps(f, a, b, w, q)?;
    let bound = w.value() * w.complement() * k * (b - a) / 2.0;
    Ok((
        GapBoundReport::new("C - R1", lower_gap, 0.0, bound, scale, BOUND_TOL),
        GapBoundReport::new("R2 - C", upper_gap, 0.0, bound, scale, BOUND_TOL),
    ))
}

/// Two-sided bounds on both refinement gaps from `m <= f'' <= M`.
pub fn thm33_gaps(f: &ConvexFn, a: f64, b: f64, w: Weight, q: &QuadConfig) -> Result<(GapBoundReport, GapBoundReport)> {
    oriented(a, b)?;
    interior(w)?;
    f.check_interval(a, b)?;
    let (m, big_m) = f.bounds().curvature()?;
    let (lower_gap, upper_gap, scale) = refinement_gaps(f, a, b, w, q)?;
    let base = w.value() * w.complement() * (0.5 * (b - a)).powi(2);
    Ok((
        GapBoundReport::new(
            "C - R1",
            lower_gap,
            base * m / 6.0,
            base * big_m / 6.0,
            scale,
            BOUND_TOL,
        ),
        GapBoundReport::new(
            "R2 - C",
            upper_gap,
            base * m / 3.0,
            base * big_m / 3.0,
            scale,
            BOUND_TOL,
        ),
    ))
}

/// Checks `b >= a > 0` and `v ∈ (0, 1)` for the mean corollaries.
fn mean_args(a: f64, b: f64, w: Weight) -> Result<PositivePair> {
    let p = PositivePair::new(a, b)?;
    if a > b {
        return Err(Error::Orientation { a, b });
    }
    interior(w)?;
    Ok(p)
}

/// `(a♯_{v/2} b) ∇_v (a♯_{(1+v)/2} b)` and `(a∇_v b) ∇ (a♯_v b)`.
fn log_mean_refinements(p: PositivePair, w: Weight) -> (f64, f64) {
    let lower = lerp(geom_raw(p.a, p.b, w.halved()), geom_raw(p.a, p.b, w.halved_upper()), w);
    let upper = 0.5 * (lerp(p.a, p.b, w) + geom_raw(p.a, p.b, w));
    (lower, upper)
}

/// `log` of `(a♯_v b) ♯ (a∇_v b)` and of `(a∇_{v/2} b) ♯_v (a∇_{(1+v)/2} b)`.
fn ln_identric_refinements(p: PositivePair, w: Weight) -> (f64, f64) {
    let ln_geo = w.complement() * p.a.ln() + w.value() * p.b.ln();
    let lower = 0.5 * (ln_geo + lerp(p.a, p.b, w).ln());
    let upper = w.complement() * lerp(p.a, p.b, w.halved()).ln() + w.value() * lerp(p.a, p.b, w.halved_upper()).ln();
    (lower, upper)
}

fn ln_scale(xs: &[f64]) -> f64 {
    max_abs(xs).max(1.0)
}

/// Difference-type reverses of the middle log-mean inequalities:
/// `L_v - R1' <= v(1-v) b log(b/a) / 2` and `R2' - L_v <= v(1-v) b log(b/a) / 2`.
pub fn cor31_check(a: f64, b: f64, w: Weight) -> Result<(GapBoundReport, GapBoundReport)> {
    let p = mean_args(a, b, w)?;
    let l = wgt_log_mean(p, w);
    let (lower, upper) = log_mean_refinements(p, w);
    let bound = w.value() * w.complement() * b / 2.0 * (b / a).ln();
    let scale = max_abs(&[l, lower, upper]);
    Ok((
        GapBoundReport::new("L_v - R1", l - lower, 0.0, bound, scale, BOUND_TOL),
        GapBoundReport::new("R2 - L_v", upper - l, 0.0, bound, scale, BOUND_TOL),
    ))
}

/// Ratio-type reverses for the identric chain, compared on logarithms:
/// `log R1'' - log I_v <= v(1-v)(b-a)/(2a)` and `log I_v - log R2'' <= v(1-v)(b-a)/(2a)`.
pub fn cor32_check(a: f64, b: f64, w: Weight) -> Result<(GapBoundReport, GapBoundReport)> {
    let p = mean_args(a, b, w)?;
    let ln_i = ln_wgt_identric(p, w);
    let (ln_lower, ln_upper) = ln_identric_refinements(p, w);
    let bound = w.value() * w.complement() * (b - a) / (2.0 * a);
    let scale = ln_scale(&[ln_i, ln_lower, ln_upper]);
    Ok((
        GapBoundReport::new("log R1 - log I_v", ln_upper - ln_i, 0.0, bound, scale, BOUND_TOL),
        GapBoundReport::new("log I_v - log R2", ln_i - ln_lower, 0.0, bound, scale, BOUND_TOL),
    ))
}

/// Two-sided difference-type refinements with the `log²(b/a)` constants.
pub fn cor33_check(a: f64, b: f64, w: Weight) -> Result<(GapBoundReport, GapBoundReport)> {
    let p = mean_args(a, b, w)?;
    let l = wgt_log_mean(p, w);
    let (lower, upper) = log_mean_refinements(p, w);
    let base = w.value() * w.complement() * (b / a).ln().powi(2);
    let scale = max_abs(&[l, lower, upper]);
    Ok((
        GapBoundReport::new(
            "L_v - R1",
            l - lower,
            base * a / 24.0,
            base * b / 24.0,
            scale,
            BOUND_TOL,
        ),
        GapBoundReport::new(
            "R2 - L_v",
            upper - l,
            base * a / 12.0,
            base * b / 12.0,
            scale,
            BOUND_TOL,
        ),
    ))
}

/// Two-sided ratio-type refinements, compared on logarithms.
pub fn cor34_check(a: f64, b: f64, w: Weight) -> Result<(GapBoundReport, GapBoundReport)> {
    let p = mean_args(a, b, w)?;
    let ln_i = ln_wgt_identric(p, w);
    let (ln_lower, ln_upper) = ln_identric_refinements(p, w);
    let base = w.value() * w.complement() * (b - a).powi(2);
    let scale = ln_scale(&[ln_i, ln_lower, ln_upper]);
    Ok((
        GapBoundReport::new(
            "log R1 - log I_v",
            ln_upper - ln_i,
            base / (24.0 * b * b),
            base / (24.0 * a * a),
            scale,
            BOUND_TOL,
        ),
        GapBoundReport::new(
            "log I_v - log R2",
            ln_i - ln_lower,
            base / (12.0 * b * b),
            base / (12.0 * a * a),
            scale,
            BOUND_TOL,
        ),
    ))
}

/// Estimates `K = sup |f'|` and `(m, M) = (inf f'', sup f'')` over `[a, b]`.
///
/// Builtins return their exact endpoint values. Otherwise the supplied
/// derivatives (or central differences, if `allow_fd`) are sampled on an
/// `n_grid` uniform grid; `K` and `M` are inflated and `m` deflated by 1% of
/// their magnitude.
pub fn estimate_derivative_bounds(f: &ConvexFn, a: f64, b: f64, n_grid: usize, allow_fd: bool) -> Result<DerivBounds> {
    f.check_interval(a, b)?;
    if let Some(kind) = f.builtin_kind() {
        return Ok(kind.exact_bounds(a, b));
    }
    if !allow_fd && !f.has_deriv1() {
        return Err(Error::MissingDerivative("f'"));
    }
    if !allow_fd && !f.has_deriv2() {
        return Err(Error::MissingDerivative("f''"));
    }
    let grid = crate::convex::linspace(a.min(b), a.max(b), n_grid.max(2));
    let mut k = 0.0_f64;
    let mut m = f64::INFINITY;
    let mut big_m = f64::NEG_INFINITY;
    for &x in &grid {
        let d1 = f.deriv1(x).unwrap_or_else(|| f.central_first(x));
        let d2 = f.deriv2(x).unwrap_or_else(|| f.central_second(x));
        k = k.max(d1.abs());
        m = m.min(d2);
        big_m = big_m.max(d2);
    }
    Ok(DerivBounds {
        slope_bound: Some(k * (1.0 + SAMPLE_INFLATION)),
        curvature: Some((m - SAMPLE_INFLATION * m.abs(), big_m + SAMPLE_INFLATION * big_m.abs())),
    })
}

/// Attaches exact or estimated derivative bounds for `[a, b]` to `f`.
pub fn with_estimated_bounds(f: &ConvexFn, a: f64, b: f64, n_grid: usize, allow_fd: bool) -> Result<ConvexFn> {
    let bounds = estimate_derivative_bounds(f, a, b, n_grid, allow_fd)?;
    f.clone().with_bounds(bounds)
}
