//! Evaluated inequality chains and two-sided gap reports.

use serde::{Deserialize, Serialize};

/// The terms of an inequality chain `values[0] <= values[1] <= ...` together
/// with the consecutive slacks and a tolerance verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    /// `values[i + 1] - values[i]`.
    pub slacks: Vec<f64>,
    pub tol_used: f64,
    /// `max |values|`, or 1 when every term vanishes.
    pub scale: f64,
    /// Every slack is at least `-tol_used * scale`.
    pub pass: bool,
    /// Some slack lies in `(-tol_used * scale, 0)`.
    pub tight: bool,
    /// False when the chain was evaluated for a function that failed the
    /// convexity spot check; the theorems do not cover such inputs.
    pub certified: bool,
}

impl ChainReport {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, values: Vec<f64>, tol: f64) -> Self {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        debug_assert_eq!(labels.len(), values.len());
        let slacks: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let scale = chain_scale(&values);
        let floor = -tol * scale;
        let pass = slacks.iter().all(|&s| s >= floor);
        let tight = slacks.iter().any(|&s| s < 0.0 && s >= floor);
        Self {
            labels,
            values,
            slacks,
            tol_used: tol,
            scale,
            pass,
            tight,
            certified: true,
        }
    }

    /// Slacks divided by the chain scale.
    pub fn relative_slacks(&self) -> impl Iterator<Item = f64> + '_ {
        self.slacks.iter().map(move |s| s / self.scale)
    }

    pub fn min_relative_slack(&self) -> f64 {
        self.relative_slacks().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn chain_scale(values: &[f64]) -> f64 {
    let m = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if m > 0.0 && m.is_finite() {
        m
    } else if m == 0.0 {
        1.0
    } else {
        f64::NAN
    }
}

/// A quantity sandwiched between a lower and an upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapBoundReport {
    pub label: String,
    pub gap: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub tol_used: f64,
    /// Magnitude of the operands the gap was computed from.
    pub scale: f64,
    pub pass: bool,
}

impl GapBoundReport {
    pub fn new(label: impl Into<String>, gap: f64, lower: f64, upper: f64, scale: f64, tol: f64) -> Self {
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let slack = tol * scale;
        let pass = lower - slack <= gap && gap <= upper + slack;
        Self {
            label: label.into(),
            gap,
            lower_bound: lower,
            upper_bound: upper,
            tol_used: tol,
            scale,
            pass,
        }
    }

    /// `gap - lower_bound`, normalized by scale.
    pub fn lower_slack(&self) -> f64 {
        (self.gap - self.lower_bound) / self.scale
    }

    /// `upper_bound - gap`, normalized by scale.
    pub fn upper_slack(&self) -> f64 {
        (self.upper_bound - self.gap) / self.scale
    }
}
