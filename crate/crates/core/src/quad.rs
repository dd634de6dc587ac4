//! Composite Gauss–Legendre quadrature with uniform panel halving.
//!
//! Level `k` splits the interval into `2^k` panels, each integrated with the
//! 7-point Gauss–Legendre rule. The error estimate is the difference between
//! consecutive levels; refinement stops once it falls below `rel_tol` times
//! the integral of `|f|` (so integrals that vanish by sign cancellation still
//! converge).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NODES: [f64; 7] = [
    -0.949_107_912_342_758_5,
    -0.741_531_185_599_394_4,
    -0.405_845_151_377_397_2,
    0.0,
    0.405_845_151_377_397_2,
    0.741_531_185_599_394_4,
    0.949_107_912_342_758_5,
];

const WEIGHTS: [f64; 7] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub max_levels: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_levels: 20,
        }
    }
}

impl QuadConfig {
    pub fn new(rel_tol: f64, max_levels: u32) -> Result<Self> {
        let cfg = Self { rel_tol, max_levels };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-2).contains(&self.rel_tol) {
            return Err(Error::InvalidQuadConfig(format!(
                "rel_tol {} outside [1e-14, 1e-2]",
                self.rel_tol
            )));
        }
        if self.max_levels == 0 || self.max_levels > 30 {
            return Err(Error::InvalidQuadConfig(format!(
                "max_levels {} outside [1, 30]",
                self.max_levels
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub levels: u32,
}

/// Returns `(∫ f, ∫ |f|)` over `[lo, hi]` using `panels` equal panels.
fn composite<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, panels: u64) -> Result<(f64, f64)> {
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for p in 0..panels {
        let center = lo + (p as f64 + 0.5) * width;
        let mut panel = 0.0;
        let mut abs_panel = 0.0;
        for (x, wt) in NODES.iter().zip(WEIGHTS.iter()) {
            let at = center + half * x;
            let y = f(at);
            if !y.is_finite() {
                return Err(Error::NonFiniteIntegrand { at });
            }
            panel += wt * y;
            abs_panel += wt * y.abs();
        }
        sum += panel;
        abs_sum += abs_panel;
    }
    Ok((sum * half, abs_sum * half.abs()))
}

/// Integrates `f` over `[lo, hi]` (either orientation) to the configured
/// relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    cfg.validate()?;
    if lo == hi {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            levels: 0,
        });
    }
    let (mut prev, _) = composite(&f, lo, hi, 1)?;
    let mut err = f64::INFINITY;
    for level in 1..=cfg.max_levels {
        let (cur, abs_cur) = composite(&f, lo, hi, 1 << level)?;
        err = (cur - prev).abs();
        if err <= cfg.rel_tol * abs_cur {
            return Ok(QuadResult {
                value: cur,
                error_estimate: err,
                levels: level,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNonconvergence {
        estimate: prev,
        error: err,
        levels: cfg.max_levels,
    })
}

/// Average of `f` over `[0, 1]`.
pub fn unit_average<F: Fn(f64) -> f64>(f: F, cfg: &QuadConfig) -> Result<f64> {
    integrate(f, 0.0, 1.0, cfg).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_is_exact_through_degree_13() {
        let r = composite(&|x: f64| x.powi(12), -1.0, 1.0, 1).unwrap();
        assert_relative_eq!(r.0, 2.0 / 13.0, max_relative = 1e-14);
        let r = composite(&|x: f64| x.powi(13) + 1.0, 0.0, 1.0, 1).unwrap();
        assert_relative_eq!(r.0, 1.0 / 14.0 + 1.0, max_relative = 1e-14);
        let w: f64 = WEIGHTS.iter().sum();
        assert_relative_eq!(w, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn smooth_integrals_converge() {
        let cfg = QuadConfig::default();
        let r = integrate(f64::exp, 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::E - 1.0, max_relative = 1e-14);
        let r = integrate(|x: f64| x.ln(), 1.0, 4.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 4.0 * 4.0_f64.ln() - 3.0, max_relative = 1e-13);
        let r = integrate(f64::sin, 0.0, 2.0 * std::f64::consts::PI, &cfg).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let cfg = QuadConfig::default();
        let fwd = integrate(f64::exp, 0.0, 2.0, &cfg).unwrap().value;
        let back = integrate(f64::exp, 2.0, 0.0, &cfg).unwrap().value;
        assert_relative_eq!(fwd, -back, max_relative = 1e-15);
    }

    #[test]
    fn nonconvergence_reports_best_estimate() {
        let cfg = QuadConfig::new(1e-14, 2).unwrap();
        let err = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &cfg).unwrap_err();
        match err {
            Error::QuadratureNonconvergence {
                estimate,
                error,
                levels,
            } => {
                assert_eq!(levels, 2);
                assert!((estimate - 4.0 / 3.0).abs() < 0.05);
                assert!(error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_bounds() {
        assert!(QuadConfig::new(1e-15, 10).is_err());
        assert!(QuadConfig::new(0.1, 10).is_err());
        assert!(QuadConfig::new(1e-10, 31).is_err());
        assert!(QuadConfig::new(1e-10, 0).is_err());
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, &QuadConfig::new(1e-10, 12).unwrap());
        assert!(matches!(err, Err(Error::QuadratureNonconvergence { .. })));
        let err = integrate(|x: f64| (x - 0.5).ln(), 0.0, 1.0, &QuadConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }
}
