//! Command-line front end for `allocgrid`.
//!
//! [`run`] is the whole program minus process plumbing, so tests drive it
//! in-process with captured output.

mod commands;
pub mod output;
mod sweep;

use std::ffi::OsString;
use std::io::Write;

use allocgrid::{parse_rational, Error, ProblemInstance, Rational};
use clap::{Args, Parser, Subcommand};

use crate::output::Format;

/// Environment variable overriding the brute-force enumeration cap.
pub const MAX_ENUM_ENV: &str = "ALLOCGRID_MAX_ENUM";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "allocgrid",
    version,
    about = "Exact recovery probabilities and optimal symmetric allocations for distributed storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recovery probability of one allocation.
    Eval {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Comma-separated amounts, e.g. "2/3,2/3,1/3,1/3,1/3"; missing trailing zeros are implied.
        #[arg(long)]
        alloc: String,
        /// Evaluate by power-set enumeration instead of the DP (n <= 25).
        #[arg(long)]
        enumerate: bool,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Candidate values of m and the best symmetric allocation.
    Symmetric {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Scan every m in 1..=n instead of the candidate set.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Upper bounds and the suboptimality gap of maximal spreading.
    Bounds {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Which spreading policy is provably optimal at (p, T).
    Region {
        #[arg(long, value_parser = rational)]
        p: Rational,
        #[arg(long = "T", visible_alias = "budget", value_parser = rational)]
        budget: Rational,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Exhaustive search over allocations quantized to multiples of 1/q.
    Search {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Quantum denominator; defaults to lcm(denom T, denom p).
        #[arg(long)]
        q: Option<u64>,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Monte Carlo estimate of an allocation's recovery probability.
    Mc {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        alloc: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// P_S of every symmetric allocation over a grid of budgets.
    SweepBudget {
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = rational)]
        p: Rational,
        #[arg(long, value_parser = rational, default_value = "1")]
        t_min: Rational,
        /// Defaults to n.
        #[arg(long, value_parser = rational)]
        t_max: Option<Rational>,
        #[arg(long, value_parser = rational, default_value = "1/10")]
        t_step: Rational,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Region verdicts over a (T, p) grid.
    SweepRegion {
        #[arg(long, value_parser = rational, default_value = "1")]
        t_min: Rational,
        #[arg(long, value_parser = rational, default_value = "6")]
        t_max: Rational,
        #[arg(long, value_parser = rational, default_value = "1/20")]
        t_step: Rational,
        /// p runs over p_step, 2·p_step, ... strictly below 1.
        #[arg(long, value_parser = rational, default_value = "1/50")]
        p_step: Rational,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Gap of maximal spreading and its Chernoff envelope as n grows.
    GapAsymptotics {
        #[arg(long, value_parser = rational)]
        p: Rational,
        #[arg(long = "T", visible_alias = "budget", value_parser = rational)]
        budget: Rational,
        /// Comma-separated node counts, e.g. "50,100,200".
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[command(flatten)]
        format: FormatArgs,
    },
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, value_parser = rational)]
    p: Rational,
    #[arg(long = "T", visible_alias = "budget", value_parser = rational)]
    budget: Rational,
}

impl InstanceArgs {
    fn instance(&self) -> Result<ProblemInstance, Error> {
        ProblemInstance::new(self.n, self.p.clone(), self.budget.clone())
    }
}

#[derive(Debug, Args)]
struct FormatArgs {
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    #[arg(long)]
    json: bool,
}

impl FormatArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Table
        }
    }
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let (report, format) = match commands::dispatch(cli.command) {
        Ok(done) => done,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_DOMAIN;
        }
    };
    match report.write(format, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: writing output: {e}");
            EXIT_DOMAIN
        }
    }
}

/// Brute-force cap from [`MAX_ENUM_ENV`], falling back to the library default.
fn max_enum() -> Result<u64, Error> {
    match std::env::var(MAX_ENUM_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Precondition(format!("{MAX_ENUM_ENV} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(allocgrid::oracle::DEFAULT_MAX_ENUM),
    }
}
