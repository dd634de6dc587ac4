use std::time::Instant;

use super::{run_trials, Accumulator, Execution, Suite, SuiteConfig, SuiteReport, TrialCtx, TrialInputs};
use crate::convex::ConvexFn;
use crate::error::Result;
use crate::hh::{chain_eval, mitroi_check_with_tol, refined_mitroi_check_with_tol};
use crate::means::{mean_chain_identric, mean_chain_log, PositivePair, Weight};

/// Scalar mean chains, the seven-term chain and both Mitroi-type checks on
/// random `(a, b, v)` for every configured function.
pub fn run_scalar_suite_with(cfg: &SuiteConfig, exec: Execution) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let acc = run_trials(cfg.trials, exec, |i| trial(cfg, i));
    Ok(acc.finish(Suite::Scalar, cfg.seed, cfg.trials, started))
}

pub(super) fn trial(cfg: &SuiteConfig, i: u64) -> Accumulator {
    let mut ctx = TrialCtx::new(cfg.seed, i);
    let (a, b) = ctx.pair(cfg);
    let v = ctx.uniform(cfg.v_range);
    let mut acc = Accumulator::default();
    let inputs = TrialInputs {
        a: Some(a),
        b: Some(b),
        v: Some(v),
        ..Default::default()
    };
    let (w, pair) = match (Weight::new(v), PositivePair::new(a, b)) {
        (Ok(w), Ok(p)) => (w, p),
        (Err(e), _) | (_, Err(e)) => {
            acc.record_error(&ctx, "inputs", &inputs, &e);
            return acc;
        }
    };
    acc.record_chain(&ctx, "mean_chain_log", &mean_chain_log(pair, w), &inputs);
    acc.record_chain(&ctx, "mean_chain_identric", &mean_chain_identric(pair, w), &inputs);

    let (lo, hi) = (a.min(b), a.max(b));
    for &kind in &cfg.functions {
        let f = ConvexFn::builtin(kind);
        let inputs = TrialInputs {
            a: Some(lo),
            b: Some(hi),
            function: Some(kind.id().into()),
            ..inputs.clone()
        };
        let key = |name: &str| format!("{name}[{}]", kind.id());
        if !f.contains(lo, hi) {
            continue;
        }
        match chain_eval(&f, lo, hi, w, &cfg.quad, cfg.tol) {
            Ok(r) => acc.record_chain(&ctx, &key("seven_term"), &r, &inputs),
            Err(e) => acc.record_error(&ctx, &key("seven_term"), &inputs, &e),
        }
        let m = mitroi_check_with_tol(&f, lo, hi, w, cfg.tol);
        let [s0, s1] = m.slacks();
        acc.observe(format!("{} lower", key("mitroi")), s0);
        acc.observe(format!("{} upper", key("mitroi")), s1);
        if !m.pass {
            acc.fail(&ctx, key("mitroi"), inputs.clone(), vec![s0, s1], None);
        }
        let r = refined_mitroi_check_with_tol(&f, lo, hi, w, cfg.tol);
        let [s0, s1] = r.slacks();
        acc.observe(format!("{} refinement", key("refined_mitroi")), s0);
        acc.observe(format!("{} nonnegative", key("refined_mitroi")), s1);
        if !r.pass {
            acc.fail(&ctx, key("refined_mitroi"), inputs, vec![s0, s1], None);
        }
    }
    acc
}
