//! Weighted two-point means and their inequality chains.
//!
//! Every mean accepts `v` in the closed interval `[0, 1]`; the endpoints are
//! routed to the limits `a` (v = 0) and `b` (v = 1). The logarithmic and
//! identric means are evaluated through `expm1` and log-domain kernels so
//! that nearly equal arguments do not cancel catastrophically.

use crate::chain::ChainReport;
use crate::error::{Error, Result};

/// Below this `|log(b/a)|` the logarithmic mean switches to its second-order
/// expansion in `h = log(b/a)`.
pub const H_SWITCH: f64 = 1e-8;

/// Chain tolerance for the scalar mean chains, relative to the largest term.
pub const MEAN_CHAIN_TOL: f64 = 1e-12;

/// Below this `|log(y/x)|` the identric mean uses its series expansion.
const IDENTRIC_SWITCH: f64 = 1e-5;

/// A weight `v` in `[0, 1]`.
///
/// The complement `1 - v` is stored alongside `v` so that swapping the roles
/// of the two arguments is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    v: f64,
    complement: f64,
}

impl Weight {
    pub const HALF: Weight = Weight {
        v: 0.5,
        complement: 0.5,
    };
    pub const ZERO: Weight = Weight {
        v: 0.0,
        complement: 1.0,
    };
    pub const ONE: Weight = Weight {
        v: 1.0,
        complement: 0.0,
    };

    pub fn new(v: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&v) {
            Ok(Self { v, complement: 1.0 - v })
        } else {
            Err(Error::InvalidWeight(v))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.v
    }

    /// `1 - v`.
    #[inline]
    pub fn complement(self) -> f64 {
        self.complement
    }

    /// The weight `1 - v`.
    pub fn flipped(self) -> Self {
        Self {
            v: self.complement,
            complement: self.v,
        }
    }

    pub fn v_min(self) -> f64 {
        self.v.min(self.complement)
    }

    pub fn v_max(self) -> f64 {
        self.v.max(self.complement)
    }

    pub fn is_interior(self) -> bool {
        self.v > 0.0 && self.complement > 0.0
    }

    /// `v / 2`.
    pub fn halved(self) -> Self {
        Self {
            v: 0.5 * self.v,
            complement: 1.0 - 0.5 * self.v,
        }
    }

    /// `(1 + v) / 2`.
    pub fn halved_upper(self) -> Self {
        Self {
            v: 1.0 - 0.5 * self.complement,
            complement: 0.5 * self.complement,
        }
    }
}

impl TryFrom<f64> for Weight {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Weight::new(v)
    }
}

/// Two strictly positive mean arguments. No ordering is imposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivePair {
    pub a: f64,
    pub b: f64,
}

impl PositivePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        Ok(Self { a, b })
    }

    pub fn swapped(self) -> Self {
        Self { a: self.b, b: self.a }
    }

    pub fn scaled(self, c: f64) -> Result<Self> {
        Self::new(c * self.a, c * self.b)
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// `(1 - v) x + v y` on arbitrary reals.
#[inline]
pub fn lerp(x: f64, y: f64, w: Weight) -> f64 {
    if x == y {
        return x;
    }
    w.complement() * x + w.value() * y
}

/// `x^(1 - v) y^v` on positive reals, evaluated in the log domain.
#[inline]
pub fn geom_raw(x: f64, y: f64, w: Weight) -> f64 {
    if x == y || w.value() == 0.0 {
        x
    } else if w.complement() == 0.0 {
        y
    } else {
        (w.complement() * x.ln() + w.value() * y.ln()).exp()
    }
}

/// `log(x / y)`, falling back to `log x - log y` when the ratio is not a
/// normal float.
fn log_ratio(x: f64, y: f64) -> f64 {
    let r = x / y;
    if r.is_normal() {
        r.ln()
    } else {
        x.ln() - y.ln()
    }
}

/// `a ∇_v b = (1 - v) a + v b`.
pub fn wgt_arith(p: PositivePair, w: Weight) -> f64 {
    lerp(p.a, p.b, w)
}

/// `a ♯_v b = a^(1 - v) b^v`.
pub fn wgt_geom(p: PositivePair, w: Weight) -> f64 {
    geom_raw(p.a, p.b, w)
}

/// `L_v(1, e^h)` for `h <= 0`, where `v` and `vc = 1 - v` are interior.
///
/// Uses `e^h - e^{vh} = e^{vh} expm1((1 - v) h)` so that both summands carry
/// the sign of `h` and nothing cancels.
fn log_mean_exp_nonpos(h: f64, v: f64, vc: f64) -> f64 {
    debug_assert!(h <= 0.0);
    if h.abs() < H_SWITCH {
        return 1.0 + v * h + v * (1.0 + 2.0 * v) * h * h / 6.0;
    }
    let left = vc / v * (v * h).exp_m1();
    let right = v / vc * (v * h).exp() * (vc * h).exp_m1();
    (left + right) / h
}

/// `L_v(1, e^h)` for any real `h`.
fn log_mean_exp(h: f64, w: Weight) -> f64 {
    let (v, vc) = (w.value(), w.complement());
    if v == 0.0 {
        1.0
    } else if vc == 0.0 {
        h.exp()
    } else if h > 0.0 {
        // L_v(1, t) = t L_{1-v}(1, 1/t)
        h.exp() * log_mean_exp_nonpos(-h, vc, v)
    } else {
        log_mean_exp_nonpos(h, v, vc)
    }
}

/// The representing function `t ↦ L_v(1, t)` of the weighted logarithmic mean.
pub fn log_mean_unit(t: f64, w: Weight) -> f64 {
    if t == 1.0 {
        return 1.0;
    }
    log_mean_exp(t.ln(), w)
}

/// Weighted logarithmic mean `L_v(a, b)`.
///
/// `L_v(a, a) = a` for every `v`; `L_0 = a` and `L_1 = b`.
pub fn wgt_log_mean(p: PositivePair, w: Weight) -> f64 {
    let PositivePair { a, b } = p;
    if a == b || w.value() == 0.0 {
        return a;
    }
    if w.complement() == 0.0 {
        return b;
    }
    // Factor out the larger argument so the kernel only sees h <= 0.
    if b > a {
        b * log_mean_exp_nonpos(log_ratio(a, b), w.complement(), w.value())
    } else {
        a * log_mean_exp_nonpos(log_ratio(b, a), w.value(), w.complement())
    }
}

/// `log I(x, y)` for the unweighted identric mean, i.e. the average of
/// `log` over the segment between `x` and `y`.
fn ln_identric_pair(x: f64, y: f64) -> f64 {
    if x == y {
        return x.ln();
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let u = log_ratio(hi, lo);
    // I(lo, hi) = lo * exp(u / (1 - e^{-u}) - 1)
    let g = if u < IDENTRIC_SWITCH {
        u / 2.0 + u * u / 12.0
    } else {
        u / -(-u).exp_m1() - 1.0
    };
    lo.ln() + g
}

/// `log I_v(a, b)`.
///
/// The weighted identric mean is the geometric combination
/// `I(a, c)^(1 - v) I(c, b)^v` with `c = a ∇_v b`, i.e. the `v`-weighted
/// average of `log` over `[a, c]` and `[c, b]`.
pub fn ln_wgt_identric(p: PositivePair, w: Weight) -> f64 {
    let PositivePair { a, b } = p;
    if a == b || w.value() == 0.0 {
        return a.ln();
    }
    if w.complement() == 0.0 {
        return b.ln();
    }
    let c = lerp(a, b, w);
    w.complement() * ln_identric_pair(a, c) + w.value() * ln_identric_pair(c, b)
}

/// Weighted identric mean `I_v(a, b)`.
pub fn wgt_identric(p: PositivePair, w: Weight) -> f64 {
    let PositivePair { a, b } = p;
    if a == b || w.value() == 0.0 {
        return a;
    }
    if w.complement() == 0.0 {
        return b;
    }
    ln_wgt_identric(p, w).exp()
}

/// Labels of the logarithmic-mean chain, smallest term first.
pub const LOG_CHAIN_LABELS: [&str; 5] = [
    "geometric",
    "geometric_split",
    "log_mean",
    "arith_geom_average",
    "arithmetic",
];

/// Labels of the identric-mean chain, smallest term first.
pub const IDENTRIC_CHAIN_LABELS: [&str; 5] = [
    "geometric",
    "geom_arith_geometric",
    "identric",
    "arithmetic_split",
    "arithmetic",
];

/// `a♯_v b ≤ (a♯_{v/2} b)∇_v(a♯_{(1+v)/2} b) ≤ L_v(a, b) ≤ (a∇_v b)∇(a♯_v b) ≤ a∇_v b`.
pub fn mean_chain_log(p: PositivePair, w: Weight) -> ChainReport {
    let geo = wgt_geom(p, w);
    let ari = wgt_arith(p, w);
    let split = lerp(wgt_geom(p, w.halved()), wgt_geom(p, w.halved_upper()), w);
    let values = vec![geo, split, wgt_log_mean(p, w), 0.5 * (ari + geo), ari];
    ChainReport::new(LOG_CHAIN_LABELS, values, MEAN_CHAIN_TOL)
}

/// `a♯_v b ≤ (a♯_v b)♯(a∇_v b) ≤ I_v(a, b) ≤ (a∇_{v/2} b)♯_v(a∇_{(1+v)/2} b) ≤ a∇_v b`.
pub fn mean_chain_identric(p: PositivePair, w: Weight) -> ChainReport {
    let geo = wgt_geom(p, w);
    let ari = wgt_arith(p, w);
    let lower = geom_raw(geo, ari, Weight::HALF);
    let upper = geom_raw(wgt_arith(p, w.halved()), wgt_arith(p, w.halved_upper()), w);
    let values = vec![geo, lower, wgt_identric(p, w), upper, ari];
    ChainReport::new(IDENTRIC_CHAIN_LABELS, values, MEAN_CHAIN_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    fn w(v: f64) -> Weight {
        Weight::new(v).unwrap()
    }

    /// Direct transcription of the defining formula; only usable away from
    /// a = b and the v endpoints.
    fn log_mean_direct(a: f64, b: f64, v: f64) -> f64 {
        let g = a.powf(1.0 - v) * b.powf(v);
        ((1.0 - v) / v * (a - g) + v / (1.0 - v) * (g - b)) / (a.ln() - b.ln())
    }

    /// Direct log-domain transcription of the closed-form weighted identric mean.
    fn identric_direct(a: f64, b: f64, v: f64) -> f64 {
        let c = (1.0 - v) * a + v * b;
        let ln = -1.0
            + (1.0 - 2.0 * v) * c / (v * (1.0 - v) * (b - a)) * c.ln()
            + (v * b * b.ln() / (1.0 - v) - (1.0 - v) * a * a.ln() / v) / (b - a);
        ln.exp()
    }

    #[test]
    fn weight_validation() {
        assert!(Weight::new(-0.1).is_err());
        assert!(Weight::new(1.5).is_err());
        assert!(Weight::new(f64::NAN).is_err());
        let x = w(0.3);
        assert_eq!(x.v_min(), 0.3);
        assert_eq!(x.v_max(), 0.7);
        assert_eq!(x.v_min() + x.v_max(), 1.0);
        assert_eq!(x.halved().value(), 0.15);
        assert_relative_eq!(x.halved_upper().value(), 0.65, epsilon = 1e-16);
    }

    #[test]
    fn pair_validation() {
        assert!(PositivePair::new(0.0, 1.0).is_err());
        assert!(PositivePair::new(1.0, -2.0).is_err());
        assert!(PositivePair::new(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(wgt_arith(pair(1.0, 3.0), Weight::HALF), 2.0);
        assert_eq!(wgt_arith(pair(5.0, 9.0), Weight::ZERO), 5.0);
        assert_eq!(wgt_arith(pair(5.0, 9.0), Weight::ONE), 9.0);
        assert_eq!(wgt_arith(pair(4.0, 1.0), w(0.25)), 3.25);
    }

    #[test]
    fn geometric_examples() {
        assert_relative_eq!(wgt_geom(pair(1.0, 16.0), Weight::HALF), 4.0, max_relative = 1e-15);
        assert_eq!(wgt_geom(pair(7.0, 7.0), w(0.3)), 7.0);
        assert_relative_eq!(
            wgt_geom(pair(1.0, 2.0), w(0.25)),
            1.189_207_115_002_721,
            max_relative = 1e-15
        );
    }

    #[test]
    fn log_mean_examples() {
        let e = std::f64::consts::E;
        assert_relative_eq!(wgt_log_mean(pair(1.0, e), Weight::HALF), e - 1.0, max_relative = 1e-15);
        assert_eq!(wgt_log_mean(pair(3.0, 3.0), w(0.7)), 3.0);
        // 40-digit reference: 1.208813457670543725...
        assert_relative_eq!(
            wgt_log_mean(pair(1.0, 2.0), w(0.25)),
            1.208_813_457_670_543_7,
            max_relative = 1e-15
        );
        assert_eq!(wgt_log_mean(pair(2.0, 9.0), Weight::ZERO), 2.0);
        assert_eq!(wgt_log_mean(pair(2.0, 9.0), Weight::ONE), 9.0);
    }

    #[test]
    fn log_mean_matches_direct_formula_away_from_singularities() {
        for &(a, b) in &[(1.0, 2.0), (0.3, 7.0), (9.0, 0.01), (500.0, 2.0)] {
            for &v in &[0.1, 0.25, 0.5, 0.8, 0.95] {
                assert_relative_eq!(
                    wgt_log_mean(pair(a, b), w(v)),
                    log_mean_direct(a, b, v),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn identric_examples() {
        let e = std::f64::consts::E;
        assert_relative_eq!(
            wgt_identric(pair(1.0, e), Weight::HALF),
            (1.0 / (e - 1.0)).exp(),
            max_relative = 1e-14
        );
        assert_eq!(wgt_identric(pair(5.0, 5.0), w(0.2)), 5.0);
        // (1/e) 4^(4/3)
        let closed = 4.0_f64.powf(4.0 / 3.0) / e;
        assert_relative_eq!(closed, 2.335_888_847_652_083_3, max_relative = 1e-15);
        assert_relative_eq!(wgt_identric(pair(1.0, 4.0), Weight::HALF), closed, max_relative = 1e-14);
        assert_eq!(wgt_identric(pair(2.0, 9.0), Weight::ZERO), 2.0);
        assert_eq!(wgt_identric(pair(2.0, 9.0), Weight::ONE), 9.0);
    }

    #[test]
    fn identric_matches_closed_form_away_from_singularities() {
        for &(a, b) in &[(1.0, 4.0), (0.3, 7.0), (9.0, 0.5), (1.0, 10.0)] {
            for &v in &[0.1, 1.0 / 3.0, 0.5, 0.8, 0.9] {
                assert_relative_eq!(
                    wgt_identric(pair(a, b), w(v)),
                    identric_direct(a, b, v),
                    max_relative = 1e-11
                );
            }
        }
    }

    #[test]
    fn switch_point_is_continuous() {
        for &v in &[0.01, 0.3, 0.5, 0.9, 0.99] {
            let wt = w(v);
            let below = log_mean_exp_nonpos(-H_SWITCH * (1.0 - 1e-9), v, 1.0 - v);
            let above = log_mean_exp_nonpos(-H_SWITCH * (1.0 + 1e-9), v, 1.0 - v);
            assert!((below - above).abs() <= 1e-12, "v = {v}: {below} vs {above}");
            let t = (H_SWITCH * 1.000_001).exp();
            let s = (H_SWITCH * 0.999_999).exp();
            assert!((log_mean_unit(t, wt) - log_mean_unit(s, wt)).abs() <= 1e-12);
        }
    }

    #[test]
    fn near_equal_arguments_do_not_cancel() {
        for &v in &[0.1, 0.5, 0.9] {
            let l = wgt_log_mean(pair(1.0, 1.0 + 1e-13), w(v));
            assert!(l.is_finite());
            assert!((l - 1.0).abs() <= 1e-8);
            let i = wgt_identric(pair(1.0, 1.0 + 1e-13), w(v));
            assert!((i - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn v_endpoint_limit_is_monotone() {
        let p = pair(2.0, 7.0);
        let gaps: Vec<f64> = [1e-4, 1e-8, 1e-12]
            .iter()
            .map(|&v| (wgt_log_mean(p, w(v)) - 2.0).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        assert!(gaps[2] < 1e-10);
    }

    #[test]
    fn log_chain_examples() {
        let r = mean_chain_log(pair(1.0, 1.0), w(0.4));
        assert!(r.values.iter().all(|&x| x == 1.0));
        let r = mean_chain_log(pair(1.0, 2.0), w(0.25));
        assert_relative_eq!(r.values[2], 1.208_813_457_670_543_7, max_relative = 1e-15);
        assert!(r.slacks.iter().all(|&s| s >= 0.0), "{r:?}");
        assert!(mean_chain_log(pair(4.0, 1.0), w(0.25)).pass);
    }

    #[test]
    fn identric_chain_examples() {
        let r = mean_chain_identric(pair(2.0, 2.0), Weight::HALF);
        assert!(r.values.iter().all(|&x| x == 2.0));
        let r = mean_chain_identric(pair(1.0, 4.0), Weight::HALF);
        assert_relative_eq!(r.values[2], 2.335_888_847_652_083_3, max_relative = 1e-14);
        assert!(r.slacks.iter().all(|&s| s >= 0.0));
        assert!(mean_chain_identric(pair(1.0, 10.0), w(0.9)).pass);
    }

    #[test]
    fn chains_degenerate_at_weight_endpoints() {
        for wt in [Weight::ZERO, Weight::ONE] {
            let r = mean_chain_log(pair(3.0, 5.0), wt);
            assert!(r.pass);
            let target = if wt.value() == 0.0 { 3.0 } else { 5.0 };
            assert!(r.values.iter().all(|&x| (x - target).abs() < 1e-14), "{r:?}");
            assert!(mean_chain_identric(pair(3.0, 5.0), wt).pass);
        }
    }

    fn arg() -> impl Strategy<Value = f64> {
        (-3.0_f64..3.0).prop_map(|e| 10f64.powf(e))
    }

    fn interior() -> impl Strategy<Value = f64> {
        0.001_f64..0.999
    }

    proptest! {
        #[test]
        fn swapping_arguments_flips_weight(a in arg(), b in arg(), v in interior()) {
            let wt = w(v);
            let l1 = wgt_log_mean(pair(a, b), wt);
            let l2 = wgt_log_mean(pair(b, a), wt.flipped());
            prop_assert!((l1 - l2).abs() <= 1e-12 * l1);
            let i1 = wgt_identric(pair(a, b), wt);
            let i2 = wgt_identric(pair(b, a), wt.flipped());
            prop_assert!((i1 - i2).abs() <= 1e-12 * i1);
        }

        #[test]
        fn means_are_homogeneous(a in arg(), b in arg(), v in interior(), c in arg()) {
            let wt = w(v);
            let p = pair(a, b);
            let q = p.scaled(c).unwrap();
            for f in [wgt_arith, wgt_geom, wgt_log_mean, wgt_identric] {
                let lhs = f(q, wt);
                let rhs = c * f(p, wt);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
            }
        }

        #[test]
        fn means_lie_between_arguments(a in arg(), b in arg(), v in 0.0_f64..=1.0) {
            let wt = w(v);
            let p = pair(a, b);
            let (lo, hi) = (a.min(b), a.max(b));
            for f in [wgt_arith, wgt_geom, wgt_log_mean, wgt_identric] {
                let m = f(p, wt);
                prop_assert!(m >= lo * (1.0 - 1e-14) && m <= hi * (1.0 + 1e-14), "{m} not in [{lo}, {hi}]");
            }
        }

        #[test]
        fn both_chains_hold(a in arg(), b in arg(), v in interior()) {
            let p = pair(a, b);
            let wt = w(v);
            let l = mean_chain_log(p, wt);
            prop_assert!(l.pass, "{:?}", l);
            let i = mean_chain_identric(p, wt);
            prop_assert!(i.pass, "{:?}", i);
        }
    }
}
