use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wlmean::Builtin;

#[derive(Debug, Parser)]
#[command(
    name = "wlmean",
    version,
    about = "Weighted log/identric means, Hermite-Hadamard refinements and operator means"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar weighted means.
    #[command(subcommand)]
    Means(MeansCmd),
    /// Hermite-Hadamard integral mean and the seven-term chain.
    #[command(subcommand)]
    Hh(HhCmd),
    /// Derivative-based gap bounds and the mean corollaries.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Operator means of SPD matrix pairs.
    #[command(subcommand)]
    Op(OpCmd),
    /// Randomized verification suites.
    Verify(VerifyArgs),
    /// Mean chains over a grid of (a, b, v); CSV unless --format json.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanKind {
    Arith,
    Geom,
    Log,
    Identric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainKind {
    Log,
    Identric,
}

#[derive(Debug, Args)]
pub struct Point {
    #[arg(long, value_parser = positive)]
    pub a: f64,
    #[arg(long, value_parser = positive)]
    pub b: f64,
    #[arg(long, value_parser = unit)]
    pub v: f64,
}

#[derive(Debug, Subcommand)]
pub enum MeansCmd {
    /// Evaluate one mean.
    Eval {
        #[arg(long, value_enum)]
        mean: MeanKind,
        #[command(flatten)]
        point: Point,
    },
    /// Evaluate the log-mean or identric chain.
    Chain {
        #[arg(long, value_enum, default_value = "log")]
        mean: ChainKind,
        #[command(flatten)]
        point: Point,
    },
}

#[derive(Debug, Args)]
pub struct FnPoint {
    #[arg(long = "f", value_parser = builtin)]
    pub f: Builtin,
    #[command(flatten)]
    pub point: Point,
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum HhCmd {
    /// The seven-term chain from f(a∇_v b) to f(a)∇_v f(b).
    Chain(FnPoint),
    /// The weighted integral mean C_{f,v}(a, b).
    C(FnPoint),
}

#[derive(Debug, Subcommand)]
pub enum BoundsCmd {
    /// Slope-bound sandwich for both refinement gaps.
    Thm32(FnPoint),
    /// Curvature-bound sandwich for both refinement gaps.
    Thm33(FnPoint),
    Cor31(Point),
    Cor32(Point),
    Cor33(Point),
    Cor34(Point),
}

#[derive(Debug, Args)]
pub struct PairFile {
    /// JSON file `{"A": {"dim": n, "rows": [...]}, "B": {...}}`.
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, value_parser = unit)]
    pub v: f64,
}

#[derive(Debug, Subcommand)]
pub enum OpCmd {
    /// Loewner verdicts for the operator chain.
    Chain {
        #[command(flatten)]
        pair: PairFile,
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
    },
    /// One operator mean.
    Eval {
        #[command(flatten)]
        pair: PairFile,
        #[arg(long, value_enum, default_value = "geom")]
        mean: MeanKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Scalar,
    Bounds,
    Operator,
    PaperNumbers,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
    /// Record wall time (otherwise `wall_ms` is null and output is reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub axis: char,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Axis spec `a:lo:hi:n`, `b:lo:hi:n` or `v:lo:hi:n`; repeatable.
    #[arg(long = "grid", value_parser = grid_spec)]
    pub grid: Vec<GridSpec>,
}

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn positive(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{x} must be positive"))
    }
}

pub fn unit(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} must lie in [0, 1]"))
    }
}

fn builtin(s: &str) -> Result<Builtin, String> {
    s.parse().map_err(|_| {
        let ids: Vec<_> = Builtin::ALL.iter().map(|b| b.id()).collect();
        format!("unknown function `{s}` (expected one of {})", ids.join(", "))
    })
}

fn grid_spec(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [axis, lo, hi, n] = parts[..] else {
        return Err(format!("`{s}` is not of the form axis:lo:hi:n"));
    };
    let axis = match axis {
        "a" => 'a',
        "b" => 'b',
        "v" => 'v',
        _ => return Err(format!("unknown axis `{axis}` (expected a, b or v)")),
    };
    let (lo, hi) = if axis == 'v' {
        (unit(lo)?, unit(hi)?)
    } else {
        (positive(lo)?, positive(hi)?)
    };
    if lo > hi {
        return Err(format!("{lo} > {hi}"));
    }
    let n: usize = n.parse().map_err(|_| format!("`{n}` is not a count"))?;
    Ok(GridSpec { axis, lo, hi, n })
}
