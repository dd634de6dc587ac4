mod args;
mod output;
mod scan;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;
use wlmean::bounds::{
    cor31_check, cor32_check, cor33_check, cor34_check, thm32_gaps, thm33_gaps, with_estimated_bounds,
};
use wlmean::harness::{run_suite, Execution, Suite, SuiteConfig};
use wlmean::hh::{c_fv, chain_eval, CHAIN_TOL};
use wlmean::means::{mean_chain_identric, mean_chain_log, wgt_arith, wgt_geom, wgt_identric, wgt_log_mean};
use wlmean::operator::{
    op_chain, op_weighted_arith, op_weighted_geom, op_weighted_log, MatrixJson, MatrixPair, LOEWNER_TOL,
};
use wlmean::{ConvexFn, Error, PositivePair, QuadConfig, Weight};

use args::{
    BoundsCmd, ChainKind, Cli, Command, FnPoint, Format, HhCmd, MeanKind, MeansCmd, OpCmd, PairFile, Point, SuiteArg,
};
use output::Output;

const BOUND_GRID: usize = 64;

enum Failure {
    /// Invalid input: one line on stderr, exit 2.
    Usage(String),
    /// The computation itself failed: JSON error on stdout, exit 1.
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

type Outcome = std::result::Result<Output, Failure>;

fn pair(p: &Point) -> wlmean::Result<(PositivePair, Weight)> {
    Ok((PositivePair::new(p.a, p.b)?, Weight::new(p.v)?))
}

fn means(cmd: &MeansCmd) -> Outcome {
    match cmd {
        MeansCmd::Eval { mean, point } => {
            let (p, w) = pair(point)?;
            let x = match mean {
                MeanKind::Arith => wgt_arith(p, w),
                MeanKind::Geom => wgt_geom(p, w),
                MeanKind::Log => wgt_log_mean(p, w),
                MeanKind::Identric => wgt_identric(p, w),
            };
            Ok(Output::value(x))
        }
        MeansCmd::Chain { mean, point } => {
            let (p, w) = pair(point)?;
            let r = match mean {
                ChainKind::Log => mean_chain_log(p, w),
                ChainKind::Identric => mean_chain_identric(p, w),
            };
            Ok(Output::chain(&r))
        }
    }
}

fn hh(cmd: &HhCmd) -> Outcome {
    let q = QuadConfig::default();
    match cmd {
        HhCmd::Chain(fp) => {
            let w = Weight::new(fp.point.v)?;
            let f = ConvexFn::builtin(fp.f);
            let r = chain_eval(&f, fp.point.a, fp.point.b, w, &q, fp.tol.unwrap_or(CHAIN_TOL))?;
            Ok(Output::chain(&r))
        }
        HhCmd::C(fp) => {
            let w = Weight::new(fp.point.v)?;
            let f = ConvexFn::builtin(fp.f);
            Ok(Output::value(c_fv(&f, fp.point.a, fp.point.b, w, &q)?))
        }
    }
}

fn theorem(fp: &FnPoint, slope: bool) -> Outcome {
    let Point { a, b, v } = fp.point;
    let w = Weight::new(v)?;
    let f = with_estimated_bounds(&ConvexFn::builtin(fp.f), a.min(b), a.max(b), BOUND_GRID, false)?;
    let q = QuadConfig::default();
    let (x, y) = if slope {
        thm32_gaps(&f, a, b, w, &q)?
    } else {
        thm33_gaps(&f, a, b, w, &q)?
    };
    Ok(Output::gaps(&[x, y]))
}

fn bounds(cmd: &BoundsCmd) -> Outcome {
    let cor = |p: &Point, check: fn(f64, f64, Weight) -> wlmean::Result<_>| -> Outcome {
        let (x, y) = check(p.a, p.b, Weight::new(p.v)?)?;
        Ok(Output::gaps(&[x, y]))
    };
    match cmd {
        BoundsCmd::Thm32(fp) => theorem(fp, true),
        BoundsCmd::Thm33(fp) => theorem(fp, false),
        BoundsCmd::Cor31(p) => cor(p, cor31_check),
        BoundsCmd::Cor32(p) => cor(p, cor32_check),
        BoundsCmd::Cor33(p) => cor(p, cor33_check),
        BoundsCmd::Cor34(p) => cor(p, cor34_check),
    }
}

fn read_pair(pf: &PairFile) -> std::result::Result<MatrixPair, Failure> {
    let text = std::fs::read_to_string(&pf.file)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", pf.file.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("invalid matrix pair in {}: {e}", pf.file.display())))
}

fn op(cmd: &OpCmd) -> Outcome {
    match cmd {
        OpCmd::Chain { pair, tol } => {
            let m = read_pair(pair)?;
            let r = op_chain(&m.a, &m.b, Weight::new(pair.v)?, tol.unwrap_or(LOEWNER_TOL))?;
            Ok(Output::operator_chain(&r))
        }
        OpCmd::Eval { pair, mean } => {
            let m = read_pair(pair)?;
            let w = Weight::new(pair.v)?;
            let x = match mean {
                MeanKind::Arith => op_weighted_arith(&m.a, &m.b, w)?,
                MeanKind::Geom => op_weighted_geom(&m.a, &m.b, w)?,
                MeanKind::Log => op_weighted_log(&m.a, &m.b, w)?,
                MeanKind::Identric => {
                    return Err(Failure::Usage(
                        "no operator identric mean; use arith, geom or log".into(),
                    ))
                }
            };
            Ok(Output::matrix(&MatrixJson::from(x.matrix())))
        }
    }
}

fn verify(args: &args::VerifyArgs) -> Outcome {
    let suite = match args.suite {
        SuiteArg::Scalar => Suite::Scalar,
        SuiteArg::Bounds => Suite::Bounds,
        SuiteArg::Operator => Suite::Operator,
        SuiteArg::PaperNumbers => Suite::PaperNumbers,
    };
    let mut cfg = SuiteConfig::default_for(suite);
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Auto
    };
    let mut report = run_suite(suite, &cfg, exec)?;
    if !args.timing {
        report = report.without_timing();
    }
    Ok(Output::suite(&report))
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Means(c) => means(c),
        Command::Hh(c) => hh(c),
        Command::Bounds(c) => bounds(c),
        Command::Op(c) => op(c),
        Command::Verify(v) => verify(v),
        Command::Scan(s) => match scan::resolve(&s.grid) {
            Some(axes) => Ok(scan::scan(&axes)?),
            None => Err(Failure::Usage("empty grid".into())),
        },
    }
}

/// The leading paragraph of a clap diagnostic, joined onto one line.
fn one_line(rendered: &str) -> String {
    let parts: Vec<&str> = rendered
        .lines()
        .map(str::trim)
        .skip_while(|l| l.is_empty())
        .take_while(|l| !l.is_empty())
        .collect();
    if parts.is_empty() {
        "error: invalid arguments".into()
    } else {
        parts.join(" ")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", one_line(&e.render().to_string()));
            return ExitCode::from(2);
        }
    };
    let default_format = if matches!(cli.command, Command::Scan(_)) {
        Format::Csv
    } else {
        Format::Json
    };
    let format = cli.format.unwrap_or(default_format);
    let mut stdout = std::io::stdout().lock();
    match dispatch(&cli.command) {
        Ok(out) => {
            if let Err(e) = out.write(format, &mut stdout) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(stdout, "{}", json!({ "error": e.to_string() }));
            ExitCode::from(1)
        }
    }
}
