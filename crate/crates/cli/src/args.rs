//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ebac_core::Rational;

use crate::number::parse_exact;

fn exact(text: &str) -> Result<Rational, String> {
    parse_exact(text).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "ebac",
    version,
    about = "Effective bandwidth, equivalent capacity and admission control for T-SPEC flow mixes",
    long_about = "Effective bandwidth, equivalent capacity and admission control for T-SPEC flow mixes.\n\n\
                  Scenario files and flags use Mb/s for rates, kb (1000 bits) for sizes and seconds for \
                  times. Numbers may be decimals or fractions such as 1/3.\n\n\
                  Exit codes: 0 success or accepted, 2 usage or domain error, 3 rejected, 4 bound violated."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Scenario selection and overrides shared by every command.
#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Flow counts per class, comma separated, replacing the file's counts.
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<u64>>,
    /// Delay constraint in seconds.
    #[arg(long = "D", value_name = "SECONDS", value_parser = exact, allow_hyphen_values = true)]
    pub delay: Option<Rational>,
    /// Link capacity in Mb/s.
    #[arg(long = "C", value_name = "MBPS", value_parser = exact, allow_hyphen_values = true)]
    pub capacity: Option<Rational>,
    /// Buffer in kb.
    #[arg(long = "B", value_name = "KB", value_parser = exact, allow_hyphen_values = true)]
    pub buffer: Option<Rational>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate effective bandwidth with all candidate rates and thresholds.
    Eb(Common),
    /// Equivalent capacity of the aggregate for the buffer B.
    Ec(Common),
    /// Shared buffer needed when the aggregate is served at its effective bandwidth.
    Buffer(Common),
    /// Admission decision for the requested counts (exit 3 when rejected).
    Admit(Common),
    /// Effective bandwidth and buffer over a range of delay constraints, as CSV.
    #[command(name = "sweep-d")]
    SweepD {
        #[command(flatten)]
        common: Common,
        #[arg(long = "d-min", value_name = "SECONDS", value_parser = exact, allow_hyphen_values = true)]
        d_min: Rational,
        #[arg(long = "d-max", value_name = "SECONDS", value_parser = exact, allow_hyphen_values = true)]
        d_max: Rational,
        /// Number of evenly spaced delays, endpoints included.
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Pareto frontier of admissible count vectors, or trade-off tables.
    Region {
        #[command(flatten)]
        common: Common,
        /// Counts with `*` marking the one or two free classes, e.g. `2,*,*`.
        #[arg(long, conflicts_with = "pairwise")]
        fixed: Option<String>,
        /// Trade-off table for every pair of classes, other classes at zero.
        #[arg(long)]
        pairwise: bool,
        /// Per-class count ceiling; required when a class has zero sustainable rate.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Drive the greedy aggregate through a server at its effective bandwidth.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Time step in seconds.
        #[arg(long, value_name = "SECONDS", value_parser = exact)]
        dt: Option<Rational>,
        /// Simulated time in seconds.
        #[arg(long, value_name = "SECONDS", value_parser = exact)]
        horizon: Option<Rational>,
        /// Also write the sampled trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Eb(c) | Command::Ec(c) | Command::Buffer(c) | Command::Admit(c) => c,
            Command::SweepD { common, .. } | Command::Region { common, .. } | Command::Simulate { common, .. } => {
                common
            }
        }
    }
}
