use serde_json::{Map, Value};
use wlmean::means::{mean_chain_identric, mean_chain_log, IDENTRIC_CHAIN_LABELS, LOG_CHAIN_LABELS};
use wlmean::{PositivePair, Result, Weight};

use crate::args::GridSpec;
use crate::output::{num, Output};

pub const DEFAULT_GRID: [GridSpec; 3] = [
    GridSpec {
        axis: 'a',
        lo: 0.1,
        hi: 10.0,
        n: 11,
    },
    GridSpec {
        axis: 'b',
        lo: 0.1,
        hi: 10.0,
        n: 11,
    },
    GridSpec {
        axis: 'v',
        lo: 0.1,
        hi: 0.9,
        n: 9,
    },
];

/// Axis points, evenly spaced and including both ends.
pub fn axis_points(g: &GridSpec) -> Vec<f64> {
    match g.n {
        0 => Vec::new(),
        1 => vec![g.lo],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    g.hi
                } else {
                    g.lo + (g.hi - g.lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Column names: the grid point, then each chain's terms and consecutive
/// slacks, then the overall verdict.
pub fn header() -> Vec<String> {
    let mut h: Vec<String> = vec!["a".into(), "b".into(), "v".into()];
    for (prefix, labels) in [("log", LOG_CHAIN_LABELS), ("identric", IDENTRIC_CHAIN_LABELS)] {
        h.extend(labels.iter().map(|l| format!("{prefix}_{l}")));
        h.extend((1..labels.len()).map(|i| format!("{prefix}_slack_{i}")));
    }
    h.push("pass".into());
    h
}

/// Later specs for the same axis replace earlier ones; missing axes use the
/// default grid. Returns `None` when the grid has no points.
pub fn resolve(specs: &[GridSpec]) -> Option<[Vec<f64>; 3]> {
    let pick = |d: &GridSpec| specs.iter().rev().find(|s| s.axis == d.axis).copied().unwrap_or(*d);
    let axes = DEFAULT_GRID.map(|d| axis_points(&pick(&d)));
    axes.iter().all(|x| !x.is_empty()).then_some(axes)
}

pub fn scan(axes: &[Vec<f64>; 3]) -> Result<Output> {
    let header = header();
    let mut rows = Vec::new();
    let mut objects = Vec::new();
    let mut ok = true;
    for &a in &axes[0] {
        for &b in &axes[1] {
            for &v in &axes[2] {
                let (p, w) = (PositivePair::new(a, b)?, Weight::new(v)?);
                let log = mean_chain_log(p, w);
                let idr = mean_chain_identric(p, w);
                let pass = log.pass && idr.pass;
                ok &= pass;
                let mut nums = vec![a, b, v];
                for c in [&log, &idr] {
                    nums.extend(&c.values);
                    nums.extend(&c.slacks);
                }
                let mut obj = Map::new();
                for (k, x) in header.iter().zip(&nums) {
                    obj.insert(k.clone(), Value::from(*x));
                }
                obj.insert("pass".into(), Value::Bool(pass));
                objects.push(Value::Object(obj));
                let mut row: Vec<String> = nums.iter().map(|x| num(*x)).collect();
                row.push(pass.to_string());
                rows.push(row);
            }
        }
    }
    Ok(Output {
        json: Value::Array(objects),
        header,
        rows,
        ok,
    })
}
