//! Convex functions on an open interval, with optional derivatives and
//! derivative bounds, plus the builtin registry.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative violation of midpoint convexity at which a function is rejected.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// Relative agreement required between a supplied first derivative and a
/// central finite difference.
pub const DERIVATIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Exp,
    NegLog,
    Square,
    Quartic,
    #[serde(rename = "xlogx")]
    XLogX,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::Exp,
        Builtin::NegLog,
        Builtin::Square,
        Builtin::Quartic,
        Builtin::XLogX,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Builtin::Exp => "exp",
            Builtin::NegLog => "neg-log",
            Builtin::Square => "square",
            Builtin::Quartic => "quartic",
            Builtin::XLogX => "xlogx",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Builtin::Exp => x.exp(),
            Builtin::NegLog => -x.ln(),
            Builtin::Square => x * x,
            Builtin::Quartic => (x * x) * (x * x),
            Builtin::XLogX => x * x.ln(),
        }
    }

    pub fn deriv1(self, x: f64) -> f64 {
        match self {
            Builtin::Exp => x.exp(),
            Builtin::NegLog => -1.0 / x,
            Builtin::Square => 2.0 * x,
            Builtin::Quartic => 4.0 * x * x * x,
            Builtin::XLogX => x.ln() + 1.0,
        }
    }

    pub fn deriv2(self, x: f64) -> f64 {
        match self {
            Builtin::Exp => x.exp(),
            Builtin::NegLog => 1.0 / (x * x),
            Builtin::Square => 2.0,
            Builtin::Quartic => 12.0 * x * x,
            Builtin::XLogX => 1.0 / x,
        }
    }

    /// Open interval on which the function is convex.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Builtin::NegLog | Builtin::XLogX => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Exact `K = sup |f'|`, `m = inf f''`, `M = sup f''` over `[lo, hi]`.
    ///
    /// Every builtin has monotone `f'` and `f''` on each side of zero, so the
    /// extremes sit at the endpoints (or at zero for `t⁴`).
    pub fn exact_bounds(self, lo: f64, hi: f64) -> DerivBounds {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let k = self.deriv1(lo).abs().max(self.deriv1(hi).abs());
        let (m, big_m) = match self {
            Builtin::Exp => (lo.exp(), hi.exp()),
            Builtin::NegLog => (1.0 / (hi * hi), 1.0 / (lo * lo)),
            Builtin::Square => (2.0, 2.0),
            Builtin::Quartic => {
                let min_sq = if lo <= 0.0 && hi >= 0.0 {
                    0.0
                } else {
                    (lo * lo).min(hi * hi)
                };
                (12.0 * min_sq, 12.0 * (lo * lo).max(hi * hi))
            }
            Builtin::XLogX => (1.0 / hi, 1.0 / lo),
        };
        DerivBounds {
            slope_bound: Some(k),
            curvature: Some((m, big_m)),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.id() == s)
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}

/// Bounds on the derivatives of `f` over a specific interval.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivBounds {
    /// `K` with `|f'| <= K`.
    pub slope_bound: Option<f64>,
    /// `(m, M)` with `m <= f'' <= M`.
    pub curvature: Option<(f64, f64)>,
}

impl DerivBounds {
    pub fn slope(&self) -> Result<f64> {
        self.slope_bound.ok_or(Error::MissingBound("K"))
    }

    pub fn curvature(&self) -> Result<(f64, f64)> {
        self.curvature.ok_or(Error::MissingBound("m, M"))
    }
}

/// A convex function together with whatever derivative information is known.
#[derive(Clone)]
pub struct ConvexFn {
    id: String,
    eval: RealFn,
    deriv1: Option<RealFn>,
    deriv2: Option<RealFn>,
    domain: (f64, f64),
    builtin: Option<Builtin>,
    bounds: DerivBounds,
}

impl fmt::Debug for ConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFn")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("deriv1", &self.deriv1.is_some())
            .field("deriv2", &self.deriv2.is_some())
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl From<Builtin> for ConvexFn {
    fn from(b: Builtin) -> Self {
        ConvexFn::builtin(b)
    }
}

impl ConvexFn {
    pub fn builtin(b: Builtin) -> Self {
        Self {
            id: b.id().to_string(),
            eval: Arc::new(move |x| b.eval(x)),
            deriv1: Some(Arc::new(move |x| b.deriv1(x))),
            deriv2: Some(Arc::new(move |x| b.deriv2(x))),
            domain: b.domain(),
            builtin: Some(b),
            bounds: DerivBounds::default(),
        }
    }

    /// A user-supplied function. Convexity is not verified here; see
    /// [`ConvexFn::check_convexity`].
    pub fn custom<F>(id: impl Into<String>, eval: F, domain: (f64, f64)) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            eval: Arc::new(eval),
            deriv1: None,
            deriv2: None,
            domain,
            builtin: None,
            bounds: DerivBounds::default(),
        }
    }

    pub fn with_deriv1<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, d: F) -> Self {
        self.deriv1 = Some(Arc::new(d));
        self
    }

    pub fn with_deriv2<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, d: F) -> Self {
        self.deriv2 = Some(Arc::new(d));
        self
    }

    pub fn with_slope_bound(mut self, k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::NonPositive { name: "K", value: k });
        }
        self.bounds.slope_bound = Some(k);
        Ok(self)
    }

    pub fn with_curvature_bounds(mut self, m: f64, big_m: f64) -> Result<Self> {
        if !(m <= big_m) {
            return Err(Error::InvalidCurvatureBounds { m, big_m });
        }
        self.bounds.curvature = Some((m, big_m));
        Ok(self)
    }

    pub fn with_bounds(mut self, bounds: DerivBounds) -> Result<Self> {
        if let Some((m, big_m)) = bounds.curvature {
            if !(m <= big_m) {
                return Err(Error::InvalidCurvatureBounds { m, big_m });
            }
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn builtin_kind(&self) -> Option<Builtin> {
        self.builtin
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn bounds(&self) -> &DerivBounds {
        &self.bounds
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn deriv1(&self, x: f64) -> Option<f64> {
        self.deriv1.as_ref().map(|d| d(x))
    }

    pub fn deriv2(&self, x: f64) -> Option<f64> {
        self.deriv2.as_ref().map(|d| d(x))
    }

    pub fn has_deriv1(&self) -> bool {
        self.deriv1.is_some()
    }

    pub fn has_deriv2(&self) -> bool {
        self.deriv2.is_some()
    }

    /// Is the closed segment between `a` and `b` inside the open domain?
    pub fn contains(&self, a: f64, b: f64) -> bool {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        lo.is_finite() && hi.is_finite() && lo > self.domain.0 && hi < self.domain.1
    }

    pub fn check_interval(&self, a: f64, b: f64) -> Result<()> {
        if self.contains(a, b) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                id: self.id.clone(),
                lo: a.min(b),
                hi: a.max(b),
            })
        }
    }

    /// Spot-checks midpoint convexity on every pair of an `n`-point grid over
    /// `[a, b]`.
    pub fn check_convexity(&self, a: f64, b: f64, n: usize) -> Result<()> {
        self.check_interval(a, b)?;
        let grid = linspace(a, b, n.max(2));
        let values: Vec<f64> = grid.iter().map(|&x| self.eval(x)).collect();
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let (x, y) = (grid[i], grid[j]);
                let mid = self.eval(0.5 * (x + y));
                let chord = 0.5 * (values[i] + values[j]);
                let scale = 1.0_f64.max(values[i].abs()).max(values[j].abs());
                let violation = mid - chord;
                if !(violation <= CONVEXITY_TOL * scale) {
                    return Err(Error::NotConvex {
                        id: self.id.clone(),
                        x,
                        y,
                        violation,
                    });
                }
            }
        }
        Ok(())
    }

    /// Compares the supplied first derivative against central differences.
    pub fn check_derivatives(&self, a: f64, b: f64, n: usize) -> Result<()> {
        self.check_interval(a, b)?;
        let Some(d1) = &self.deriv1 else {
            return Ok(());
        };
        for x in linspace(a, b, n.max(2)) {
            let supplied = d1(x);
            let estimated = self.central_first(x);
            if !((supplied - estimated).abs() <= DERIVATIVE_TOL * supplied.abs().max(1.0)) {
                return Err(Error::DerivativeMismatch {
                    id: self.id.clone(),
                    at: x,
                    supplied,
                    estimated,
                });
            }
        }
        Ok(())
    }

    fn fd_step(&self, x: f64, base: f64) -> f64 {
        let mut h = base * x.abs().max(1.0);
        while !(x - h > self.domain.0 && x + h < self.domain.1) {
            h *= 0.5;
        }
        h
    }

    pub(crate) fn central_first(&self, x: f64) -> f64 {
        let h = self.fd_step(x, f64::EPSILON.cbrt());
        (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
    }

    pub(crate) fn central_second(&self, x: f64) -> f64 {
        let h = self.fd_step(x, f64::EPSILON.powf(0.25));
        (self.eval(x + h) - 2.0 * self.eval(x) + self.eval(x - h)) / (h * h)
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + step * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.id().parse::<Builtin>().unwrap(), b);
            assert_eq!(serde_json::to_string(&b).unwrap(), format!("\"{}\"", b.id()));
        }
        assert!("cosh".parse::<Builtin>().is_err());
    }

    #[test]
    fn builtins_are_convex_with_consistent_derivatives() {
        for b in Builtin::ALL {
            let f = ConvexFn::builtin(b);
            f.check_convexity(0.1, 10.0, 25).unwrap();
            f.check_derivatives(0.1, 10.0, 25).unwrap();
        }
    }

    #[test]
    fn non_convex_function_is_rejected() {
        let f = ConvexFn::custom("sin", f64::sin, (f64::NEG_INFINITY, f64::INFINITY));
        assert!(matches!(f.check_convexity(0.0, 3.0, 9), Err(Error::NotConvex { .. })));
        let g = ConvexFn::custom("cosh", f64::cosh, (f64::NEG_INFINITY, f64::INFINITY));
        g.check_convexity(-2.0, 2.0, 9).unwrap();
    }

    #[test]
    fn wrong_derivative_is_rejected() {
        let f = ConvexFn::custom("sq", |x| x * x, (f64::NEG_INFINITY, f64::INFINITY)).with_deriv1(|x| 3.0 * x);
        assert!(matches!(
            f.check_derivatives(0.5, 2.0, 5),
            Err(Error::DerivativeMismatch { .. })
        ));
    }

    #[test]
    fn domain_is_open() {
        let f = ConvexFn::builtin(Builtin::NegLog);
        assert!(f.contains(0.5, 2.0));
        assert!(!f.contains(0.0, 2.0));
        assert!(f.check_interval(-1.0, 2.0).is_err());
    }

    #[test]
    fn curvature_bounds_must_be_ordered() {
        let f = ConvexFn::builtin(Builtin::Exp);
        assert!(f.clone().with_curvature_bounds(2.0, 1.0).is_err());
        let f = f.with_curvature_bounds(1.0, 2.0).unwrap();
        assert_eq!(f.bounds().curvature().unwrap(), (1.0, 2.0));
        assert!(matches!(f.bounds().slope(), Err(Error::MissingBound("K"))));
    }

    #[test]
    fn exact_bounds_examples() {
        let e = std::f64::consts::E;
        let b = Builtin::Exp.exact_bounds(1.0, 2.0);
        assert_eq!(b.slope_bound, Some((2.0_f64).exp()));
        assert_eq!(b.curvature, Some((e, (2.0_f64).exp())));
        let b = Builtin::NegLog.exact_bounds(1.0, 4.0);
        assert_eq!(b.slope_bound, Some(1.0));
        assert_eq!(b.curvature, Some((1.0 / 16.0, 1.0)));
        let b = Builtin::Quartic.exact_bounds(0.0, 1.0);
        assert_eq!(b.slope_bound, Some(4.0));
        assert_eq!(b.curvature, Some((0.0, 12.0)));
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.1, 10.0, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 10.0);
    }
}
