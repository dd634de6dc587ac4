//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlmean::bounds::{thm33_gaps, with_estimated_bounds};
use wlmean::convex::{Builtin, ConvexFn};
use wlmean::harness::{
    reproduce_paper_numbers, run_bounds_suite, run_operator_suite, run_scalar_suite, SuiteConfig, SuiteReport,
};
use wlmean::hh::c_fv;
use wlmean::means::{ln_wgt_identric, wgt_arith, wgt_geom, wgt_identric, wgt_log_mean};
use wlmean::operator::{op_weighted_arith, op_weighted_geom, op_weighted_log, SpdMatrix};
use wlmean::{PositivePair, QuadConfig, Weight};

type ScalarMean = fn(PositivePair, Weight) -> f64;
type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn w(v: f64) -> Weight {
    Weight::new(v).unwrap()
}

fn pair(a: f64, b: f64) -> PositivePair {
    PositivePair::new(a, b).unwrap()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn worst(r: &SuiteReport, prefix: &str) -> f64 {
    r.min_slacks
        .iter()
        .filter(|(k, _)| k.starts_with(prefix))
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min)
}

fn failures(r: &SuiteReport, prefix: &str) -> usize {
    r.failures.iter().filter(|f| f.check.starts_with(prefix)).count()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn paper_numbers() -> Verdict {
    let t = Instant::now();
    let r = reproduce_paper_numbers();
    let elapsed = t.elapsed();
    let v = |k: &str| r.values[k];
    let x = v("p1-p2 exp v=0.25 a=4 b=1");
    let y = v("p1-p2 exp v=0.25 a=8 b=1");
    let ok = (x - 4.35403).abs() <= 5e-4 && (y + 30.7996).abs() <= 5e-3 && r.pass && elapsed < Duration::from_secs(1);
    verdict(
        ok,
        format!("p1-p2 = {x} at (4,1), {y} at (8,1); {:.3} s", secs(elapsed)),
    )
}

fn seven_term_chain() -> Verdict {
    let cfg = SuiteConfig::scalar_default();
    let t = Instant::now();
    let r = run_scalar_suite(&cfg).unwrap();
    let elapsed = t.elapsed();
    let n = failures(&r, "seven_term");
    let ok = r.trials == 10_000 && cfg.functions.len() == 5 && n == 0 && r.pass && elapsed < Duration::from_secs(60);
    verdict(
        ok,
        format!(
            "{} trials x {} functions, {n} violations, min relative slack {:.3e}; {:.2} s",
            r.trials,
            cfg.functions.len(),
            worst(&r, "seven_term"),
            secs(elapsed)
        ),
    )
}

fn quadrature_oracle() -> Verdict {
    let q = QuadConfig::default();
    let exp = ConvexFn::builtin(Builtin::Exp);
    let neg_log = ConvexFn::builtin(Builtin::NegLog);
    let grid = linspace(0.1, 3.0, 21);
    let mut max_exp = 0.0_f64;
    let mut max_log = 0.0_f64;
    let mut points = 0;
    for &a in &grid {
        for &b in &grid {
            for k in 1..=9 {
                let wv = w(k as f64 / 10.0);
                let l = wgt_log_mean(pair(a.exp(), b.exp()), wv);
                max_exp = max_exp.max((c_fv(&exp, a, b, wv, &q).unwrap() - l).abs() / l);
                let ln_i = ln_wgt_identric(pair(a, b), wv);
                let err = (c_fv(&neg_log, a, b, wv, &q).unwrap() + ln_i).abs();
                let rel = if err == 0.0 { 0.0 } else { err / ln_i.abs() };
                max_log = max_log.max(rel);
                points += 1;
            }
        }
    }
    verdict(
        points == 21 * 21 * 9 && max_exp <= 1e-8 && max_log <= 1e-8,
        format!("{points} points; max rel error exp {max_exp:.2e}, -log {max_log:.2e}"),
    )
}

fn theorem_sandwiches() -> Verdict {
    let cfg = SuiteConfig {
        functions: vec![Builtin::Exp, Builtin::NegLog],
        ..SuiteConfig::bounds_default()
    };
    let r = run_bounds_suite(&cfg).unwrap();
    let thm_fail = failures(&r, "thm32") + failures(&r, "thm33");

    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let q = QuadConfig::default();
    let square = ConvexFn::builtin(Builtin::Square);
    let mut pin_err = 0.0_f64;
    let mut coincide = true;
    for _ in 0..cfg.trials {
        let (x, y) = (log_uniform(&mut rng, 0.1, 10.0), log_uniform(&mut rng, 0.1, 10.0));
        let (a, b) = (x.min(y), x.max(y));
        if b - a < 1e-6 {
            continue;
        }
        let wv = w(rng.random_range(0.01..0.99));
        let f = with_estimated_bounds(&square, a, b, 64, false).unwrap();
        let (lo, hi) = thm33_gaps(&f, a, b, wv, &q).unwrap();
        for g in [&lo, &hi] {
            coincide &= g.lower_bound == g.upper_bound;
            pin_err = pin_err.max((g.gap - g.lower_bound).abs() / g.scale);
        }
    }
    verdict(
        r.trials == 2000 && thm_fail == 0 && coincide && pin_err <= 1e-10,
        format!(
            "{} trials, {thm_fail} violations, min slack {:.3e}; t^2 bounds coincide: {coincide}, max pin error {pin_err:.2e}",
            r.trials,
            worst(&r, "thm3")
        ),
    )
}

fn corollaries() -> Verdict {
    let cfg = SuiteConfig {
        functions: Vec::new(),
        ..SuiteConfig::bounds_default()
    };
    let r = run_bounds_suite(&cfg).unwrap();
    let per: Vec<String> = ["cor31", "cor32", "cor33", "cor34"]
        .iter()
        .map(|c| format!("{c} {} fail / min slack {:.2e}", failures(&r, c), worst(&r, c)))
        .collect();
    let positive = failures(&r, "cor33 positive") == 0;
    verdict(
        r.trials == 2000 && r.pass && positive,
        format!(
            "{} trials; {}; cor33 lower bounds positive: {positive}",
            r.trials,
            per.join(", ")
        ),
    )
}

fn operator_chain() -> Verdict {
    let cfg = SuiteConfig {
        grid_points: 0,
        ..SuiteConfig::operator_default()
    };
    let t = Instant::now();
    let r = run_operator_suite(&cfg).unwrap();
    let elapsed = t.elapsed();
    let ok = cfg.tol == 1e-10 && cfg.cond == 1e4 && r.trials == 500 * 4 && r.pass && elapsed < Duration::from_secs(60);
    verdict(
        ok,
        format!(
            "{} pairs over dims {:?}, {} failures, min relative margin {:.3e}; {:.2} s",
            r.trials,
            cfg.dims,
            r.failures.len(),
            worst(&r, "op_chain"),
            secs(elapsed)
        ),
    )
}

fn diagonal_reduction() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut max_err = 0.0_f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=8);
        let xs: Vec<f64> = (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect();
        let ys: Vec<f64> = (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect();
        let wv = w(rng.random_range(0.01..0.99));
        let (a, b) = (SpdMatrix::diagonal(&xs).unwrap(), SpdMatrix::diagonal(&ys).unwrap());
        let means: [(SpdMatrix, ScalarMean); 3] = [
            (op_weighted_arith(&a, &b, wv).unwrap(), wgt_arith),
            (op_weighted_geom(&a, &b, wv).unwrap(), wgt_geom),
            (op_weighted_log(&a, &b, wv).unwrap(), wgt_log_mean),
        ];
        for (m, scalar) in &means {
            for i in 0..dim {
                for j in 0..dim {
                    let expected = if i == j { scalar(pair(xs[i], ys[i]), wv) } else { 0.0 };
                    max_err = max_err.max((m.matrix()[(i, j)] - expected).abs());
                }
            }
        }
    }
    verdict(max_err <= 1e-12, format!("100 trials, max entry error {max_err:.2e}"))
}

fn stability() -> Verdict {
    let mut near = true;
    for v in [0.1, 0.5, 0.9] {
        let x = wgt_log_mean(pair(1.0, 1.0 + 1e-13), w(v));
        near &= x.is_finite() && (x - 1.0).abs() <= 1e-8;
    }
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut sym, mut hom) = (0.0_f64, 0.0_f64);
    for _ in 0..10_000 {
        let (a, b, t) = (
            log_uniform(&mut rng, 0.1, 10.0),
            log_uniform(&mut rng, 0.1, 10.0),
            log_uniform(&mut rng, 0.1, 10.0),
        );
        let wv = w(rng.random_range(0.01..0.99));
        for mean in [wgt_log_mean as ScalarMean, wgt_identric] {
            let m = mean(pair(a, b), wv);
            sym = sym.max(rel(mean(pair(b, a), wv.flipped()), m));
            hom = hom.max(rel(mean(pair(t * a, t * b), wv), t * m));
        }
    }
    verdict(
        near && sym <= 1e-12 && hom <= 1e-12,
        format!("L_v(1, 1+1e-13) within 1e-8 of 1: {near}; 10000 trials, symmetry {sym:.2e}, homogeneity {hom:.2e}"),
    )
}

fn determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_wlmean"))
            .args(["verify", "scalar", "--seed", "42", "--trials", "1000"])
            .output()
            .expect("binary runs")
    };
    let (x, y) = (run(), run());
    let cfg = SuiteConfig {
        seed: 42,
        trials: 1000,
        ..SuiteConfig::scalar_default()
    };
    let lib = serde_json::to_string(&run_scalar_suite(&cfg).unwrap().without_timing()).unwrap() + "\n";
    let ok = x.status.success() && x.stdout == y.stdout && x.stdout == lib.as_bytes();
    verdict(
        ok,
        format!(
            "two runs of verify scalar --seed 42 --trials 1000: {} bytes each, identical: {}",
            x.stdout.len(),
            x.stdout == y.stdout
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("published values", paper_numbers),
        ("seven-term chain", seven_term_chain),
        ("quadrature vs closed form", quadrature_oracle),
        ("gap sandwiches and t^2 pinning", theorem_sandwiches),
        ("mean corollaries", corollaries),
        ("operator chain", operator_chain),
        ("diagonal reduction", diagonal_reduction),
        ("numerical stability", stability),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!(
            "{} criterion {} ({name}): {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
