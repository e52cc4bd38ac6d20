use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cluster_bounds::numerics::PRECISION_CAP_ENV;
use cluster_bounds::unloading::PivotPolicy;

#[derive(Debug, Parser)]
#[command(name = "cluster-bounds", version, about = "Degree bounds for plane curves through general multiple points")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format; `sweep` defaults to csv, everything else to table.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Exit with status 3 when any verdict stays inconclusive.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Lift the caps on r, m and n (500, 1000000, 500).
    #[arg(long, global = true)]
    pub allow_large: bool,

    /// Highest precision, in significant digits, tried before giving up.
    #[arg(long, global = true, env = PRECISION_CAP_ENV, default_value_t = 4096)]
    pub precision_cap: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the bound for one (r, m) against Nagata's, the √ form and Xu's.
    Bound {
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// Tabulate the bound over ranges of r and m.
    Sweep {
        #[arg(long, default_value_t = 2)]
        r_min: u64,
        #[arg(long)]
        r_max: u64,
        #[arg(long, default_value_t = 1)]
        m_min: u64,
        #[arg(long)]
        m_max: Option<u64>,
    },
    /// Run the stage-by-stage unloading that certifies the bound.
    Simulate {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        m: u64,
        /// Include every unloading step.
        #[arg(long)]
        trace: bool,
    },
    /// Unload a weighted cluster read from a file (`-` for stdin).
    Unload {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Policy::Lowest)]
        policy: Policy,
    },
    /// Certify b(n) > √n − π/8 together with every step of its proof.
    VerifyProp {
        #[arg(long, default_value_t = 9)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
        /// Starting precision in significant digits.
        #[arg(long, default_value_t = 64)]
        precision: u32,
        /// Series terms used in the Parseval step.
        #[arg(long, default_value_t = cluster_bounds::producte::DEFAULT_CHAIN_TERMS)]
        terms: u64,
        /// Print the proof chain for every n.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Lowest,
    Highest,
    MostNegative,
}

impl From<Policy> for PivotPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Lowest => PivotPolicy::LowestIndex,
            Policy::Highest => PivotPolicy::HighestIndex,
            Policy::MostNegative => PivotPolicy::MostNegative,
        }
    }
}
