//! Seeded randomized verification suites.
//!
//! Trial `i` draws its inputs from a ChaCha stream seeded with `seed ^ i`, so
//! a trial's inputs do not depend on which worker runs it or in what order.
//! Per-trial results are merged with an associative, order-independent
//! reduction (minimum slacks, summed counters, failures sorted by trial), so
//! parallel and sequential runs produce identical reports.

mod bounds;
mod operator;
mod published;
mod scalar;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainReport, GapBoundReport};
use crate::convex::Builtin;
use crate::error::{Error, Result};
use crate::quad::QuadConfig;

pub use bounds::run_bounds_suite_with;
pub use operator::{random_spd, run_operator_suite_with};
pub use published::reproduce_paper_numbers;
pub use scalar::run_scalar_suite_with;

/// How trials are scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    /// Parallel when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Auto,
    Sequential,
    Parallel,
}

impl Execution {
    fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Execution::Sequential
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Scalar,
    Bounds,
    Operator,
    PaperNumbers,
}

impl Suite {
    pub fn id(self) -> &'static str {
        match self {
            Suite::Scalar => "scalar",
            Suite::Bounds => "bounds",
            Suite::Operator => "operator",
            Suite::PaperNumbers => "paper-numbers",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Trials per suite (per dimension for the operator suite).
    pub trials: u64,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub v_range: (f64, f64),
    pub functions: Vec<Builtin>,
    pub tol: f64,
    pub dims: Vec<usize>,
    /// Draws with `|b - a|` below this are resampled (up to a fixed number
    /// of attempts).
    pub min_gap: f64,
    /// Condition-number cap for random SPD operands.
    pub cond: f64,
    /// Number of log-spaced `t` values in the representing-function grid.
    pub grid_points: usize,
    pub quad: QuadConfig,
}

impl SuiteConfig {
    pub fn scalar_default() -> Self {
        Self {
            seed: 42,
            trials: 10_000,
            a_range: (0.1, 10.0),
            b_range: (0.1, 10.0),
            v_range: (0.01, 0.99),
            functions: Builtin::ALL.to_vec(),
            tol: 1e-9,
            dims: Vec::new(),
            min_gap: 1e-6,
            cond: 1e4,
            grid_points: 0,
            quad: QuadConfig::default(),
        }
    }

    pub fn bounds_default() -> Self {
        Self {
            trials: 2_000,
            ..Self::scalar_default()
        }
    }

    pub fn operator_default() -> Self {
        Self {
            seed: 7,
            trials: 500,
            tol: 1e-10,
            dims: vec![2, 3, 5, 8],
            functions: Vec::new(),
            grid_points: 10_000,
            ..Self::scalar_default()
        }
    }

    pub fn default_for(suite: Suite) -> Self {
        match suite {
            Suite::Scalar | Suite::PaperNumbers => Self::scalar_default(),
            Suite::Bounds => Self::bounds_default(),
            Suite::Operator => Self::operator_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        for (name, (lo, hi)) in [("a_range", self.a_range), ("b_range", self.b_range)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return bad(format!("{name} ({lo}, {hi}) must be a nonempty positive interval"));
            }
        }
        let (vl, vh) = self.v_range;
        if !(vl > 0.0 && vl <= vh && vh < 1.0) {
            return bad(format!("v_range ({vl}, {vh}) must be a nonempty subinterval of (0, 1)"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol {} must be positive", self.tol));
        }
        if self.dims.contains(&0) {
            return bad("matrix dimensions must be at least 1".into());
        }
        if !(self.cond >= 1.0 && self.cond.is_finite()) {
            return bad(format!("cond {} must be at least 1", self.cond));
        }
        self.quad.validate()
    }
}

/// Inputs sufficient to replay one trial in isolation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    /// Trial index; [`replay_trial`] re-runs exactly this trial.
    pub trial: u64,
    /// Seed of the trial's random stream (`seed ^ trial`).
    pub trial_seed: u64,
    pub check: String,
    pub inputs: TrialInputs,
    pub slacks: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub pass: bool,
    pub failures: Vec<FailureRecord>,
    /// Checks whose worst slack was negative but inside the tolerance.
    pub tight: u64,
    /// Smallest normalized slack observed per inequality.
    pub min_slacks: BTreeMap<String, f64>,
    /// Named numeric results, such as the reproduced published values.
    pub values: BTreeMap<String, f64>,
    /// Wall time; `None` once stripped for reproducible output.
    pub wall_ms: Option<f64>,
}

impl SuiteReport {
    /// The report with its wall time removed, so identical configurations
    /// serialize byte-identically.
    pub fn without_timing(mut self) -> Self {
        self.wall_ms = None;
        self
    }
}

/// Merged per-trial results.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Accumulator {
    failures: Vec<FailureRecord>,
    tight: u64,
    min_slacks: BTreeMap<String, f64>,
}

impl Accumulator {
    pub(crate) fn merge(mut self, other: Accumulator) -> Accumulator {
        self.failures.extend(other.failures);
        self.tight += other.tight;
        for (k, v) in other.min_slacks {
            self.observe(k, v);
        }
        self
    }

    pub(crate) fn observe(&mut self, key: String, slack: f64) {
        let entry = self.min_slacks.entry(key).or_insert(f64::INFINITY);
        // NaN slacks poison the entry so they cannot hide.
        if slack < *entry || slack.is_nan() {
            *entry = slack;
        }
    }

    pub(crate) fn fail(
        &mut self,
        ctx: &TrialCtx,
        check: impl Into<String>,
        inputs: TrialInputs,
        slacks: Vec<f64>,
        detail: Option<String>,
    ) {
        self.failures.push(FailureRecord {
            trial: ctx.trial,
            trial_seed: ctx.trial_seed,
            check: check.into(),
            inputs,
            slacks,
            detail,
        });
    }

    pub(crate) fn record_chain(&mut self, ctx: &TrialCtx, check: &str, report: &ChainReport, inputs: &TrialInputs) {
        let rel: Vec<f64> = report.relative_slacks().collect();
        for (i, s) in rel.iter().enumerate() {
            self.observe(format!("{check} {} <= {}", report.labels[i], report.labels[i + 1]), *s);
        }
        if report.tight {
            self.tight += 1;
        }
        if !report.pass || !report.certified {
            let detail = (!report.certified).then(|| "convexity spot check failed".to_string());
            self.fail(ctx, check, inputs.clone(), rel, detail);
        }
    }

    pub(crate) fn record_gap(&mut self, ctx: &TrialCtx, check: &str, report: &GapBoundReport, inputs: &TrialInputs) {
        let lo = report.lower_slack();
        let hi = report.upper_slack();
        self.observe(format!("{check} {} lower", report.label), lo);
        self.observe(format!("{check} {} upper", report.label), hi);
        if report.pass && (lo < 0.0 || hi < 0.0) {
            self.tight += 1;
        }
        if !report.pass {
            self.fail(
                ctx,
                format!("{check} {}", report.label),
                inputs.clone(),
                vec![lo, hi],
                None,
            );
        }
    }

    pub(crate) fn record_error(&mut self, ctx: &TrialCtx, check: &str, inputs: &TrialInputs, err: &Error) {
        self.fail(ctx, check, inputs.clone(), Vec::new(), Some(err.to_string()));
    }

    fn finish(mut self, suite: Suite, seed: u64, trials: u64, started: Instant) -> SuiteReport {
        self.failures
            .sort_by(|x, y| (x.trial, &x.check).cmp(&(y.trial, &y.check)));
        SuiteReport {
            suite: suite.id().to_string(),
            seed,
            trials,
            pass: self.failures.is_empty(),
            failures: self.failures,
            tight: self.tight,
            min_slacks: self.min_slacks,
            values: BTreeMap::new(),
            wall_ms: Some(started.elapsed().as_secs_f64() * 1e3),
        }
    }
}

/// Identity and random stream of one trial.
pub(crate) struct TrialCtx {
    pub trial: u64,
    pub trial_seed: u64,
    pub rng: ChaCha8Rng,
}

impl TrialCtx {
    pub(crate) fn new(seed: u64, trial: u64) -> Self {
        let trial_seed = seed ^ trial;
        Self {
            trial,
            trial_seed,
            rng: ChaCha8Rng::seed_from_u64(trial_seed),
        }
    }

    pub(crate) fn log_uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        if lo == hi {
            return lo;
        }
        let x = self.rng.random_range(lo.ln()..hi.ln()).exp();
        x.clamp(lo, hi)
    }

    pub(crate) fn uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        if lo == hi {
            lo
        } else {
            self.rng.random_range(lo..hi)
        }
    }

    /// Draws `(a, b)` log-uniformly, resampling a bounded number of times
    /// while `|b - a| < min_gap`.
    pub(crate) fn pair(&mut self, cfg: &SuiteConfig) -> (f64, f64) {
        const ATTEMPTS: usize = 64;
        let mut draw = (self.log_uniform(cfg.a_range), self.log_uniform(cfg.b_range));
        for _ in 0..ATTEMPTS {
            if (draw.1 - draw.0).abs() >= cfg.min_gap {
                break;
            }
            draw = (self.log_uniform(cfg.a_range), self.log_uniform(cfg.b_range));
        }
        draw
    }
}

/// Runs `n` independent trials and merges their accumulators.
pub(crate) fn run_trials<F>(n: u64, exec: Execution, trial: F) -> Accumulator
where
    F: Fn(u64) -> Accumulator + Sync + Send,
{
    if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            return (0..n)
                .into_par_iter()
                .map(trial)
                .reduce(Accumulator::default, Accumulator::merge);
        }
    }
    (0..n).map(trial).fold(Accumulator::default(), Accumulator::merge)
}

pub fn run_scalar_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_scalar_suite_with(cfg, Execution::Auto)
}

pub fn run_bounds_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_bounds_suite_with(cfg, Execution::Auto)
}

pub fn run_operator_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_operator_suite_with(cfg, Execution::Auto)
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig, exec: Execution) -> Result<SuiteReport> {
    match suite {
        Suite::Scalar => run_scalar_suite_with(cfg, exec),
        Suite::Bounds => run_bounds_suite_with(cfg, exec),
        Suite::Operator => run_operator_suite_with(cfg, exec),
        Suite::PaperNumbers => Ok(reproduce_paper_numbers()),
    }
}

/// Re-runs a single trial of a randomized suite; the report contains only
/// that trial's slacks and failures.
pub fn replay_trial(suite: Suite, cfg: &SuiteConfig, trial: u64) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let acc = match suite {
        Suite::Scalar => scalar::trial(cfg, trial),
        Suite::Bounds => bounds::trial(cfg, trial),
        Suite::Operator => operator::matrix_trial(cfg, trial)?,
        Suite::PaperNumbers => return Ok(reproduce_paper_numbers()),
    };
    Ok(acc.finish(suite, cfg.seed, 1, started))
}
