use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "alphagate",
    version,
    about = "Decide when and how to adjust alpha across multiple significance tests"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    pub format: Format,

    /// Write results to PATH instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Digits after the decimal point (significant digits in scientific notation)
    #[arg(long, default_value_t = 6, global = true, value_name = "DIGITS",
          value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Individual,
    Disjunction,
    Conjunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    None,
    Bonferroni,
    Sidak,
    Holm,
    Hochberg,
    Bh,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Familywise error rate and per-family error rate for k independent tests
    Rates {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: u64,
    },
    /// Per-test alpha that holds a joint alpha across k tests
    Adjust {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Joint-versus-individual error rate report for t tests of h hypotheses
    Table1 {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        alpha: f64,
    },
    /// Judge a battery of p values (CSV with header `id,p`)
    Decide {
        #[arg(long, value_name = "FILE")]
        battery: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        alpha: f64,
        /// Adjustment method (disjunction: bonferroni|sidak|holm|hochberg; individual: none|bh)
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Declare the tests independent (disjunction then defaults to sidak instead of bonferroni)
        #[arg(long)]
        independent: bool,
    },
    /// Recommend a testing mode from the `classification` section of a scenario file
    Classify {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Run the Monte Carlo verifier on the `simulation` section of a scenario file
    Simulate {
        #[arg(long, value_name = "FILE")]
        scenario: PathBuf,
        #[arg(long)]
        reps: Option<u64>,
        /// Overrides the file and ALPHAGATE_SEED
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: available parallelism); output does not depend on it
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
        threads: Option<u64>,
    },
    /// Power of a one-sided two-sample z test, optionally for a conjunction of k tests
    Power {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        /// Per-group sample size
        #[arg(long)]
        n: u64,
        #[arg(long, requires = "conjunction")]
        k: Option<u64>,
        #[arg(long, requires = "k")]
        conjunction: bool,
        /// Also search for the alpha minimizing omega*alpha + (1-omega)*beta
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, default_value_t = 1e-6, requires = "omega")]
        alpha_min: f64,
        #[arg(long, default_value_t = 0.5, requires = "omega")]
        alpha_max: f64,
    },
}
