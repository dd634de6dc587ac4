use std::time::Instant;

use super::{run_trials, Accumulator, Execution, Suite, SuiteConfig, SuiteReport, TrialCtx, TrialInputs};
use crate::bounds::{
    cor31_check, cor32_check, cor33_check, cor34_check, thm32_gaps, thm33_gaps, with_estimated_bounds,
};
use crate::chain::GapBoundReport;
use crate::convex::ConvexFn;
use crate::error::Result;
use crate::means::Weight;

const GRID: usize = 64;

/// Refinement-gap bounds for each configured function and the four mean
/// corollaries on random oriented `(a, b, v)`.
pub fn run_bounds_suite_with(cfg: &SuiteConfig, exec: Execution) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let acc = run_trials(cfg.trials, exec, |i| trial(cfg, i));
    Ok(acc.finish(Suite::Bounds, cfg.seed, cfg.trials, started))
}

type Pair = (GapBoundReport, GapBoundReport);

/// Re-judges a gap report at the suite tolerance.
fn at_tol(r: GapBoundReport, tol: f64) -> GapBoundReport {
    GapBoundReport::new(r.label, r.gap, r.lower_bound, r.upper_bound, r.scale, tol)
}

fn record(
    acc: &mut Accumulator,
    ctx: &TrialCtx,
    check: &str,
    res: Result<Pair>,
    inputs: &TrialInputs,
    tol: f64,
) -> Option<Pair> {
    match res {
        Ok((x, y)) => {
            let (x, y) = (at_tol(x, tol), at_tol(y, tol));
            acc.record_gap(ctx, check, &x, inputs);
            acc.record_gap(ctx, check, &y, inputs);
            Some((x, y))
        }
        Err(e) => {
            acc.record_error(ctx, check, inputs, &e);
            None
        }
    }
}

pub(super) fn trial(cfg: &SuiteConfig, i: u64) -> Accumulator {
    let mut ctx = TrialCtx::new(cfg.seed, i);
    let (x, y) = ctx.pair(cfg);
    let (a, b) = (x.min(y), x.max(y));
    let v = ctx.uniform(cfg.v_range);
    let mut acc = Accumulator::default();
    let inputs = TrialInputs {
        a: Some(a),
        b: Some(b),
        v: Some(v),
        ..Default::default()
    };
    let w = match Weight::new(v) {
        Ok(w) => w,
        Err(e) => {
            acc.record_error(&ctx, "inputs", &inputs, &e);
            return acc;
        }
    };
    if a == b {
        return acc;
    }

    for &kind in &cfg.functions {
        let inputs = TrialInputs {
            function: Some(kind.id().into()),
            ..inputs.clone()
        };
        let f = match with_estimated_bounds(&ConvexFn::builtin(kind), a, b, GRID, false) {
            Ok(f) => f,
            Err(_) => continue,
        };
        record(
            &mut acc,
            &ctx,
            &format!("thm32[{}]", kind.id()),
            thm32_gaps(&f, a, b, w, &cfg.quad),
            &inputs,
            cfg.tol,
        );
        record(
            &mut acc,
            &ctx,
            &format!("thm33[{}]", kind.id()),
            thm33_gaps(&f, a, b, w, &cfg.quad),
            &inputs,
            cfg.tol,
        );
    }

    record(&mut acc, &ctx, "cor31", cor31_check(a, b, w), &inputs, cfg.tol);
    record(&mut acc, &ctx, "cor32", cor32_check(a, b, w), &inputs, cfg.tol);
    if let Some((x, y)) = record(&mut acc, &ctx, "cor33", cor33_check(a, b, w), &inputs, cfg.tol) {
        if !(x.lower_bound > 0.0 && y.lower_bound > 0.0) {
            acc.fail(
                &ctx,
                "cor33 positive lower bound",
                inputs.clone(),
                vec![x.lower_bound, y.lower_bound],
                None,
            );
        }
    }
    record(&mut acc, &ctx, "cor34", cor34_check(a, b, w), &inputs, cfg.tol);
    acc
}
