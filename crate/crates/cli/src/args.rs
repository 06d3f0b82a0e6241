//! Command-line and job-file options. Every subcommand's options are also
//! valid keys of a JSON job file (snake_case); flags override job values.

use crate::values::{Binding, ComplexList, ComplexValue, NumList, UintList};
use clap::{Args, Parser, Subcommand};
use geniter::analysis::ClassifyConfig;
use geniter::Scheme;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "geniter", version, about = "Generalized F- and V-iteration toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the iterated sequence
    Iterate(IterateCmd),
    /// Roots of f(x, .., x) = x with optional sampled stability
    FixedPoints(FixedPointsCmd),
    /// Classify the attractor reached from seeds, or from a seed grid
    Classify(ClassifyCmd),
    /// Sweep a parameter and classify at each value
    Scan(ScanCmd),
    /// Bisect a parameter bracket for a change of attractor
    Transition(TransitionCmd),
    /// Locate successive period doublings and their gap ratios
    Feigenbaum(FeigenbaumCmd),
    /// Compare periods or list the generalized Sharkovsky chain
    Sharkovsky(SharkovskyCmd),
    /// Basin-of-attraction raster
    Basin(BasinCmd),
    /// Escape-time raster over seeds
    Julia(EscapeCmd),
    /// Escape-time raster over a complex parameter
    Mandelbrot(EscapeCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Iterate(_) => "iterate",
            Command::FixedPoints(_) => "fixed-points",
            Command::Classify(_) => "classify",
            Command::Scan(_) => "scan",
            Command::Transition(_) => "transition",
            Command::Feigenbaum(_) => "feigenbaum",
            Command::Sharkovsky(_) => "sharkovsky",
            Command::Basin(_) => "basin",
            Command::Julia(_) => "julia",
            Command::Mandelbrot(_) => "mandelbrot",
        }
    }
}

/// Fills `None` fields of `self` from `other`.
pub trait Merge {
    fn merge(&mut self, other: &Self);
}

macro_rules! merge_impl {
    ($ty:ty { $($field:ident),* } $(flatten { $($group:ident),* })?) => {
        impl Merge for $ty {
            fn merge(&mut self, other: &Self) {
                $(
                    if self.$field.is_none() {
                        self.$field = other.$field.clone();
                    }
                )*
                $($( self.$group.merge(&other.$group); )*)?
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RunArgs {
    /// JSON job file; flags given on the command line take precedence
    #[arg(long)]
    #[serde(skip)]
    pub job: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "GENITER_THREADS")]
    pub threads: Option<usize>,
}
merge_impl!(RunArgs { threads });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct MapArgs {
    /// Catalog family (logistic2, logistic3, sine2, sum2, bilinear-c, biquadratic-c, twoparam32)
    #[arg(long)]
    pub family: Option<String>,
    /// Component expression, once per component (instead of --family)
    #[arg(long = "expr")]
    pub expr: Option<Vec<String>>,
    /// Domain dimension for --expr maps
    #[arg(long)]
    pub n: Option<usize>,
    /// Shortcut for --param a=VALUE
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Shortcut for --param b=VALUE
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Shortcut for --param c=VALUE (complex literal such as 0.3+0.2i)
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<ComplexValue>,
    /// Parameter binding NAME=VALUE, repeatable
    #[arg(long = "param")]
    pub param: Option<Vec<String>>,
    /// Iteration scheme, F or V
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Comma-separated seeds u_1..u_n (complex literals allowed)
    #[arg(long, allow_hyphen_values = true)]
    pub seeds: Option<ComplexList>,
}
merge_impl!(MapArgs { family, expr, n, a, b, c, param, scheme, seeds });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    /// Scalars discarded before period detection
    #[arg(long)]
    pub transient: Option<u64>,
    /// Period detection tolerance
    #[arg(long)]
    pub period_tol: Option<f64>,
    #[arg(long)]
    pub max_period: Option<usize>,
    /// Scalar budget before a trajectory is undecided
    #[arg(long)]
    pub budget: Option<u64>,
    /// Budget multiplier applied once on a near miss
    #[arg(long)]
    pub escalation: Option<u64>,
}
merge_impl!(ClassifyArgs { transient, period_tol, max_period, budget, escalation });

impl ClassifyArgs {
    pub fn resolve(&mut self, base: ClassifyConfig) -> ClassifyConfig {
        let cfg = ClassifyConfig {
            transient: self.transient.unwrap_or(base.transient),
            tol: self.period_tol.unwrap_or(base.tol),
            max_period: self.max_period.unwrap_or(base.max_period),
            budget: self.budget.unwrap_or(base.budget),
            escalation: self.escalation.unwrap_or(base.escalation),
            near_miss: base.near_miss,
        };
        self.transient = Some(cfg.transient);
        self.period_tol = Some(cfg.tol);
        self.max_period = Some(cfg.max_period);
        self.budget = Some(cfg.budget);
        self.escalation = Some(cfg.escalation);
        cfg
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// x_min,x_max,y_min,y_max
    #[arg(long, allow_hyphen_values = true)]
    pub region: Option<NumList>,
    /// Seed binding per coordinate: h, v, plane or a constant (e.g. h,v,0.5)
    #[arg(long, allow_hyphen_values = true)]
    pub binding: Option<Binding>,
    /// PGM output path
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    /// CSV output path
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
merge_impl!(GridArgs { width, height, region, binding, pgm, csv });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct IterateCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    /// Number of scalars to emit, seeds included
    #[arg(long)]
    pub count: Option<usize>,
    /// CSV output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}
merge_impl!(IterateCmd { count, out } flatten { run, map });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct FixedPointsCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub classify: ClassifyArgs,
    /// Search interval lo,hi on the diagonal
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<NumList>,
    /// Sign-scan grid size
    #[arg(long)]
    pub grid: Option<usize>,
    /// Random seeds for stability sampling (0 disables)
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    /// JSON output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}
merge_impl!(FixedPointsCmd { interval, grid, samples, rng_seed, out } flatten { run, map, classify });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ClassifyCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub classify: ClassifyArgs,
    /// Newton-refine a periodic result
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub refine: Option<bool>,
    /// Probe a seed grid with these divisions per coordinate instead of --seeds
    #[arg(long)]
    pub seed_grid: Option<UintList>,
    /// With --seed-grid, report seeds reaching this scalar period
    #[arg(long)]
    pub target_period: Option<usize>,
    /// JSON output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}
merge_impl!(ClassifyCmd { refine, seed_grid, target_period, out } flatten { run, map, classify });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ScanCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub classify: ClassifyArgs,
    /// Parameter to sweep
    #[arg(long)]
    pub sweep: Option<String>,
    /// lo,hi
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<NumList>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// CSV output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}
merge_impl!(ScanCmd { sweep, range, steps, out } flatten { run, map, classify });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct TransitionCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub classify: ClassifyArgs,
    /// Parameter to bisect
    #[arg(long)]
    pub sweep: Option<String>,
    /// lo,hi
    #[arg(long, allow_hyphen_values = true)]
    pub bracket: Option<NumList>,
    /// Final bracket width
    #[arg(long)]
    pub tol: Option<f64>,
    /// JSON output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}
merge_impl!(TransitionCmd { sweep, bracket, tol, out } flatten { run, map, classify });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct FeigenbaumCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub classify: ClassifyArgs,
    /// Parameter to vary
    #[arg(long)]
    pub sweep: Option<String>,
    /// Period before the first doubling
    #[arg(long)]
    pub base_period: Option<usize>,
    #[arg(long)]
    pub doublings: Option<usize>,
    /// lo,hi range searched for the cascade
    #[arg(long, allow_hyphen_values = true)]
    pub search: Option<NumList>,
    /// Bracket width for each doubling
    #[arg(long)]
    pub tol: Option<f64>,
    /// JSON output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}
merge_impl!(FeigenbaumCmd { sweep, base_period, doublings, search, tol, out } flatten { run, map, classify });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SharkovskyCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// Domain dimension n; periods live in (n+1)N and {1}
    #[arg(long)]
    pub n: Option<u64>,
    /// Two periods p,q to compare
    #[arg(long)]
    pub compare: Option<UintList>,
    /// List the chain of admissible periods up to this value
    #[arg(long)]
    pub limit: Option<u64>,
}
merge_impl!(SharkovskyCmd { n, compare, limit } flatten { run });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BasinCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub classify: ClassifyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}
merge_impl!(BasinCmd {} flatten { run, map, classify, grid });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct EscapeCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub escape_radius: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<u32>,
    /// Parameter bound to the grid point (mandelbrot)
    #[arg(long)]
    pub plane_param: Option<String>,
}
merge_impl!(EscapeCmd { escape_radius, max_iter, plane_param } flatten { run, map, grid });
