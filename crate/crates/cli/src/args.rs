use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use statcp::constraints::{EqMode, KsOptions};
use statcp::models::{InspectionHeuristic, InspectionParams, Rate};
use statcp::stats::{NullDistribution, SupMode};

#[derive(Debug, Parser)]
#[command(name = "statcp", version, about = "Statistical constraint models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Likely values of a mean from a fixed sample (one-sample t-test).
    TtestMean(TtestMeanArgs),
    /// Second samples that a two-sample KS test cannot tell apart from the
    /// first one.
    KsSets(KsSetsArgs),
    /// Inspection plan with exponentially distributed gaps.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Propagate at the root only.
    Propagate,
    /// Exhaustive ground checking without propagation (`inspect`: list
    /// solutions by search).
    Enumerate,
    /// Propagation and search.
    Solve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SupArg {
    Exact,
    Pointwise,
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NullArg {
    Asymptotic,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EqArg {
    TwoTailed,
    Adjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeuristicArg {
    LatestFirst,
    EarliestFirst,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Significance level in (0, 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the main output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Shuffle the search value order with this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Stop search after this many nodes.
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Stop search after this many seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Also write CDF plot data (x,f_emp,f_ref,lo,hi) to this file.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KsArgs {
    /// How the KS supremum is evaluated.
    #[arg(long, value_enum)]
    pub sup: Option<SupArg>,
    /// Null distribution of the KS statistic.
    #[arg(long, value_enum, default_value_t = NullArg::Finite)]
    pub null: NullArg,
    /// Significance handling for two-sided KS tests.
    #[arg(long, value_enum, default_value_t = EqArg::TwoTailed)]
    pub eq: EqArg,
}

impl KsArgs {
    pub fn options(&self, default_sup: SupMode) -> KsOptions {
        KsOptions {
            sup: match self.sup {
                None => default_sup,
                Some(SupArg::Exact) => SupMode::Exact,
                Some(SupArg::Pointwise) => SupMode::Pointwise,
                Some(SupArg::Envelope) => SupMode::Envelope,
            },
            null: match self.null {
                NullArg::Asymptotic => NullDistribution::Asymptotic,
                NullArg::Finite => NullDistribution::FiniteSample,
            },
            eq: match self.eq {
                EqArg::TwoTailed => EqMode::TwoTailed,
                EqArg::Adjusted => EqMode::AdjustedDecomposition,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct TtestMeanArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct KsSetsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub ks: KsArgs,
    /// Check one second sample, e.g. 5,5,9,9,9,9,9,10,10,11, instead of
    /// running the model.
    #[arg(long, value_delimiter = ',')]
    pub check: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub ks: KsArgs,
    #[arg(long, default_value_t = 10)]
    pub units: usize,
    #[arg(long, default_value_t = 25)]
    pub inspections: usize,
    #[arg(long, default_value_t = 365)]
    pub horizon: i64,
    #[arg(long, default_value_t = 1)]
    pub duration: i64,
    #[arg(long, default_value_t = 36)]
    pub max_gap: i64,
    #[arg(long, default_value_t = 1)]
    pub demand: i64,
    #[arg(long, default_value_t = 5)]
    pub capacity: i64,
    /// Inspection rate as `p/q`.
    #[arg(long, default_value = "1/5")]
    pub rate: Rate,
    #[arg(long, value_enum, default_value_t = HeuristicArg::LatestFirst)]
    pub heuristic: HeuristicArg,
    /// Stop enumeration after this many plans.
    #[arg(long, default_value_t = 10)]
    pub solution_limit: u64,
    /// Validate an existing plan CSV instead of solving.
    #[arg(long)]
    pub validate: Option<PathBuf>,
}

impl InspectArgs {
    pub fn params(&self, alpha: f64) -> InspectionParams {
        InspectionParams {
            units: self.units,
            inspections: self.inspections,
            horizon: self.horizon,
            duration: self.duration,
            max_gap: self.max_gap,
            demand: self.demand,
            capacity: self.capacity,
            rate: self.rate,
            alpha,
        }
    }

    pub fn heuristic(&self) -> InspectionHeuristic {
        match self.heuristic {
            HeuristicArg::LatestFirst => InspectionHeuristic::LatestFirst,
            HeuristicArg::EarliestFirst => InspectionHeuristic::EarliestFirst,
        }
    }
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::TtestMean(a) => &a.common,
            Command::KsSets(a) => &a.common,
            Command::Inspect(a) => &a.common,
        }
    }
}
