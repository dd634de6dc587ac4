use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};
use wlmean::harness::SuiteReport;
use wlmean::operator::{MatrixJson, OperatorChainReport};
use wlmean::{ChainReport, GapBoundReport};

use crate::args::Format;

/// A command result in both wire formats.
pub struct Output {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// False when a checked inequality failed.
    pub ok: bool,
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

impl Output {
    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => writeln!(out, "{}", self.json),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()
            }
        }
    }

    pub fn value(x: f64) -> Self {
        Self {
            json: json!({ "value": x }),
            header: names(&["value"]),
            rows: vec![vec![num(x)]],
            ok: true,
        }
    }

    pub fn chain(r: &ChainReport) -> Self {
        let rows = r
            .labels
            .iter()
            .zip(&r.values)
            .enumerate()
            .map(|(i, (label, v))| {
                let slack = r.slacks.get(i).map(|s| num(*s)).unwrap_or_default();
                vec![i.to_string(), label.clone(), num(*v), slack]
            })
            .collect();
        Self {
            json: to_json(r),
            header: names(&["index", "label", "value", "slack_to_next"]),
            rows,
            ok: r.pass,
        }
    }

    pub fn gaps(reports: &[GapBoundReport]) -> Self {
        let pass = reports.iter().all(|r| r.pass);
        let rows = reports
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    num(r.gap),
                    num(r.lower_bound),
                    num(r.upper_bound),
                    num(r.tol_used),
                    num(r.scale),
                    r.pass.to_string(),
                ]
            })
            .collect();
        Self {
            json: json!({ "reports": reports, "pass": pass }),
            header: names(&[
                "label",
                "gap",
                "lower_bound",
                "upper_bound",
                "tol_used",
                "scale",
                "pass",
            ]),
            rows,
            ok: pass,
        }
    }

    pub fn operator_chain(r: &OperatorChainReport) -> Self {
        let rows = r
            .verdicts
            .iter()
            .enumerate()
            .map(|(i, v)| {
                vec![
                    r.labels[i].clone(),
                    r.labels[i + 1].clone(),
                    num(v.min_eig_of_difference),
                    num(v.tol_used),
                    v.holds.to_string(),
                ]
            })
            .collect();
        Self {
            json: to_json(r),
            header: names(&["lhs", "rhs", "min_eig_of_difference", "tol_used", "holds"]),
            rows,
            ok: r.pass,
        }
    }

    pub fn matrix(m: &MatrixJson) -> Self {
        let rows = m
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                std::iter::once(i.to_string())
                    .chain(r.iter().map(|x| num(*x)))
                    .collect()
            })
            .collect();
        let header = std::iter::once("row".to_string())
            .chain((0..m.dim).map(|j| format!("c{j}")))
            .collect();
        Self {
            json: to_json(m),
            header,
            rows,
            ok: true,
        }
    }

    pub fn suite(r: &SuiteReport) -> Self {
        let mut rows = vec![
            vec!["summary".into(), "trials".into(), r.trials.to_string()],
            vec!["summary".into(), "failures".into(), r.failures.len().to_string()],
            vec!["summary".into(), "tight".into(), r.tight.to_string()],
        ];
        rows.extend(
            r.min_slacks
                .iter()
                .map(|(k, v)| vec!["min_slack".into(), k.clone(), num(*v)]),
        );
        rows.extend(r.values.iter().map(|(k, v)| vec!["value".into(), k.clone(), num(*v)]));
        Self {
            json: to_json(r),
            header: names(&["kind", "key", "value"]),
            rows,
            ok: r.pass,
        }
    }
}
