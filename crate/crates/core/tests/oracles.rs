use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlmean::convex::{Builtin, ConvexFn};
use wlmean::harness::{replay_trial, run_bounds_suite, Suite, SuiteConfig};
use wlmean::hh::c_fv;
use wlmean::means::lerp;
use wlmean::{QuadConfig, Weight};

/// `C_{f,v}` straight from its definition: the averages over `[a, c]` and
/// `[c, b]` by an `n`-point midpoint rule, combined with weights `1-v`, `v`.
fn c_fv_midpoint(f: &ConvexFn, a: f64, b: f64, v: f64, n: usize) -> f64 {
    let c = (1.0 - v) * a + v * b;
    let avg = |lo: f64, hi: f64| {
        let h = (hi - lo) / n as f64;
        (0..n).map(|i| f.eval(lo + (i as f64 + 0.5) * h)).sum::<f64>() / n as f64
    };
    (1.0 - v) * avg(a, c) + v * avg(c, b)
}

#[test]
fn integral_mean_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let q = QuadConfig::default();
    for k in 0..20 {
        let f = ConvexFn::builtin(Builtin::ALL[k % Builtin::ALL.len()]);
        let a = rng.random_range(0.2..4.0);
        let b = rng.random_range(0.2..4.0);
        let v = rng.random_range(0.05..0.95);
        let quad = c_fv(&f, a, b, Weight::new(v).unwrap(), &q).unwrap();
        let brute = c_fv_midpoint(&f, a, b, v, 1_000_000);
        assert!(
            (quad - brute).abs() <= 1e-6 * brute.abs().max(1.0),
            "{} a={a} b={b} v={v}: {quad} vs {brute}",
            f.id()
        );
    }
}

#[test]
fn lerp_is_exact_at_the_ends() {
    for (x, y) in [(1.0, 2.0), (3.5, -1.25), (1e-300, 1e300)] {
        assert_eq!(lerp(x, y, Weight::ZERO), x);
        assert_eq!(lerp(x, y, Weight::ONE), y);
    }
}

#[test]
fn failures_replay_in_isolation() {
    // With t² the curvature bounds are attained, so a vanishing tolerance fails on rounding.
    let cfg = SuiteConfig {
        trials: 300,
        tol: 1e-300,
        functions: vec![Builtin::Square],
        ..SuiteConfig::bounds_default()
    };
    let report = run_bounds_suite(&cfg).unwrap();
    assert!(!report.failures.is_empty());
    for f in report.failures.iter().take(5) {
        let single = replay_trial(Suite::Bounds, &cfg, f.trial).unwrap();
        assert!(single.failures.iter().any(|g| g == f), "{f:?}");
        assert_eq!(f.trial_seed, cfg.seed ^ f.trial);
    }
}
