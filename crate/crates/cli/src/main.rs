//! `proxgrid` command-line front end.
//!
//! Exit status: 0 when every asserted invariant holds, 2 for parse errors,
//! 3 for precondition failures, 4 for invariant violations.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use proxgrid::ErrorClass;

#[derive(Parser, Debug)]
#[command(
    name = "proxgrid",
    version,
    about = "Exact experiments on grid/surface intersections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Adds a failing check to the report; exercises exit status 4.
    #[arg(long, global = true, hide = true)]
    pub inject_violation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Sets from files, or `{1, …, N}` for each role.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Sets {
    /// One file per role; one rational per line.
    #[arg(long, num_args = 1..=3, conflicts_with = "n")]
    pub sets: Vec<PathBuf>,
    /// Use `{1, …, N}` for every role.
    #[arg(long = "N")]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct Anchors {
    #[arg(long, default_value = "0 0")]
    pub p1: String,
    #[arg(long, default_value = "1 0")]
    pub p2: String,
    #[arg(long, default_value = "0 1")]
    pub p3: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetFamily {
    Interval,
    Geometric,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PointFamily {
    Random,
    Line,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count `(A×B×C) ∩ Z(f)` and audit the Schwartz–Zippel ceiling.
    Count {
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        sets: Sets,
    },
    /// Additive witness `x + y - z` on `{1..N}`.
    Extremal {
        #[arg(long = "N")]
        n: usize,
    },
    /// Proximate quadruples on the curve `Z(g) ∩ (A×B)`.
    Quadruples {
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        sets: Sets,
        #[arg(long = "S", default_value_t = 1)]
        s: usize,
    },
    /// Proximate 5-tuples through heavy fibers of `Z(f)`.
    Tuples {
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        sets: Sets,
        #[arg(long = "S", default_value_t = 1)]
        s: usize,
    },
    /// Full bound chain with exact incidence checks.
    Chain {
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        sets: Sets,
        #[arg(long = "S")]
        s: Option<usize>,
        /// Rational radius constant; defaults to `4·S·c_dec`.
        #[arg(long = "K", allow_hyphen_values = true)]
        k: Option<String>,
    },
    /// Image growth `|h(A×A)|` over a set family.
    Expand {
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value_t = SetFamily::Interval)]
        family: SetFamily,
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Separability test for `h(x, y)`.
    Detect {
        #[arg(long)]
        poly: String,
    },
    /// Distinct distances between points on two lines.
    AppTwoLines {
        /// Cosine of the angle between the lines.
        #[arg(long = "cos", allow_hyphen_values = true)]
        cos_theta: String,
        #[command(flatten)]
        sets: Sets,
    },
    /// Distinct distances from three anchors.
    AppThreePoints {
        #[command(flatten)]
        anchors: Anchors,
        /// Point file, `x y` per line.
        #[arg(long, conflicts_with_all = ["n", "ns"])]
        points: Option<PathBuf>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "Ns", value_delimiter = ',')]
        ns: Vec<usize>,
        #[arg(long, value_enum, default_value_t = PointFamily::Random)]
        family: PointFamily,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distinct distances among points of a plane curve.
    AppCurve {
        #[arg(long)]
        poly: String,
        #[arg(long, conflicts_with_all = ["n", "ns"])]
        points: Option<PathBuf>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "Ns", value_delimiter = ',')]
        ns: Vec<usize>,
    },
    /// Triple points of three unit-circle families.
    AppCircles {
        #[command(flatten)]
        anchors: Anchors,
        /// Circles per family; parameters `t = 0..N-1`.
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "Ns", value_delimiter = ',')]
        ns: Vec<usize>,
    },
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Parse => 2,
        ErrorClass::Precondition => 3,
        ErrorClass::Invariant => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(e.class()));
        }
    };
    let written = match &cli.out {
        Some(path) => {
            std::fs::write(path, &outcome.text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    if outcome.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("invariant violated: {}", outcome.failed.join(", "));
        ExitCode::from(4)
    }
}
