use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{run_trials, Accumulator, Execution, Suite, SuiteConfig, SuiteReport, TrialCtx, TrialInputs};
use crate::error::{Error, Result};
use crate::means::Weight;
use crate::operator::{helper_ineq_check, op_chain, representing_chain, SpdMatrix};

const T_RANGE: (f64, f64) = (1e-4, 1e4);

/// `Q diag(λ) Qᵀ` with `Q` Haar-distributed orthogonal and `λ` log-uniform in
/// `[cond^{-1/2}, cond^{1/2}]`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, dim: usize, cond: f64) -> Result<SpdMatrix> {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let half = 0.5 * cond.ln();
    let lambda: Vec<f64> = (0..dim)
        .map(|_| {
            if half > 0.0 {
                rng.random_range(-half..half).exp()
            } else {
                1.0
            }
        })
        .collect();
    let scaled = DMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * lambda[j]);
    SpdMatrix::new(scaled * q.transpose())
}

fn v_grid() -> impl Iterator<Item = f64> {
    (1..=99).map(|k| k as f64 / 100.0)
}

fn t_at(cfg: &SuiteConfig, j: usize) -> f64 {
    let (lo, hi) = (T_RANGE.0.ln(), T_RANGE.1.ln());
    let n = cfg.grid_points;
    if n <= 1 {
        return T_RANGE.0;
    }
    (lo + (hi - lo) * j as f64 / (n - 1) as f64).exp()
}

fn matrix_trials(cfg: &SuiteConfig) -> u64 {
    cfg.trials * cfg.dims.len() as u64
}

/// The operator chain on random SPD pairs for every configured dimension,
/// then the representing-function chain and the helper inequality on a
/// log-spaced `t` grid.
pub fn run_operator_suite_with(cfg: &SuiteConfig, exec: Execution) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let total = matrix_trials(cfg) + cfg.grid_points as u64;
    let acc = run_trials(total, exec, |k| trial(cfg, k));
    Ok(acc.finish(Suite::Operator, cfg.seed, total, started))
}

/// Trial `k < trials * dims.len()` is the random pair `k mod trials` in
/// dimension `dims[k / trials]`; later indices are grid points.
pub(super) fn matrix_trial(cfg: &SuiteConfig, k: u64) -> Result<Accumulator> {
    if k >= matrix_trials(cfg) + cfg.grid_points as u64 {
        return Err(Error::InvalidConfig(format!("trial {k} is out of range")));
    }
    Ok(trial(cfg, k))
}

fn trial(cfg: &SuiteConfig, k: u64) -> Accumulator {
    let total = matrix_trials(cfg);
    if k >= total {
        return grid_point(cfg, k, (k - total) as usize);
    }
    let dim = cfg.dims[(k / cfg.trials) as usize];
    let mut ctx = TrialCtx::new(cfg.seed, k);
    let mut acc = Accumulator::default();
    let v = ctx.uniform(cfg.v_range);
    let inputs = TrialInputs {
        v: Some(v),
        dim: Some(dim),
        ..Default::default()
    };
    let run = |ctx: &mut TrialCtx| -> Result<_> {
        let a = random_spd(&mut ctx.rng, dim, cfg.cond)?;
        let b = random_spd(&mut ctx.rng, dim, cfg.cond)?;
        op_chain(&a, &b, Weight::new(v)?, cfg.tol)
    };
    match run(&mut ctx) {
        Ok(report) => {
            let margins: Vec<f64> = report.verdicts.iter().map(|x| x.relative_margin(cfg.tol)).collect();
            for (i, m) in margins.iter().enumerate() {
                acc.observe(
                    format!("op_chain[d={dim}] {} <= {}", report.labels[i], report.labels[i + 1]),
                    *m,
                );
            }
            if report.verdicts.iter().any(|x| x.holds && x.min_eig_of_difference < 0.0) {
                acc.tight += 1;
            }
            if !report.pass {
                acc.fail(&ctx, format!("op_chain[d={dim}]"), inputs, margins, None);
            }
        }
        Err(e) => acc.record_error(&ctx, &format!("op_chain[d={dim}]"), &inputs, &e),
    }
    acc
}

fn grid_point(cfg: &SuiteConfig, k: u64, j: usize) -> Accumulator {
    let ctx = TrialCtx::new(cfg.seed, k);
    let mut acc = Accumulator::default();
    let t = t_at(cfg, j);
    for v in v_grid() {
        let inputs = TrialInputs {
            t: Some(t),
            v: Some(v),
            ..Default::default()
        };
        match Weight::new(v).and_then(|w| representing_chain(t, w)) {
            Ok(r) => acc.record_chain(&ctx, "representing_chain", &r, &inputs),
            Err(e) => acc.record_error(&ctx, "representing_chain", &inputs, &e),
        }
    }
    let inputs = TrialInputs {
        t: Some(t),
        ..Default::default()
    };
    match helper_ineq_check(t) {
        Ok(h) => {
            let slack = (h.lhs - h.rhs) / h.rhs;
            acc.observe("helper (x^2-1)/log(x^2) >= x".into(), slack);
            if !h.pass {
                acc.fail(&ctx, "helper", inputs, vec![slack], None);
            }
        }
        Err(e) => acc.record_error(&ctx, "helper", &inputs, &e),
    }
    acc
}
