//! Command dispatch for the `vessel` binary.
//!
//! Every command reads JSON documents, runs one core operation and writes a
//! canonical JSON (or CSV) report. Exit codes: 0 success, 1 verification
//! failure, 2 input error.

mod commands;
pub mod report;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use report::{emit, Format, ReportError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vessel", version, about = "Verify and evaluate commutative operator vessels")]
pub struct Cli {
    /// Relative tolerance for every tolerance-bearing check.
    #[arg(long, global = true, default_value_t = vessel_core::DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for sampled operations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample count for sampled operations.
    #[arg(long, global = true, default_value_t = 30)]
    pub samples: usize,
    /// Report format.
    #[arg(long, global = true, value_name = "FORMAT")]
    pub format: Option<String>,
    /// Shorthand for `--format csv`.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Input,
    Output,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residuals of all vessel conditions.
    CheckVessel { file: String },
    /// Colligation residual and principal subspace.
    CheckColligation { file: String },
    /// Complete characteristic function W(xi1, xi2, z).
    CcfEval {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        xi1: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi2: f64,
        /// Complex number as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Joint characteristic function at a curve point.
    JcfEval {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        l1: String,
        #[arg(long, allow_hyphen_values = true)]
        l2: String,
        /// Probe direction as `xi1,xi2`.
        #[arg(long, allow_hyphen_values = true, default_value = "1,0")]
        probe: String,
    },
    /// Restoration of W(xi, z) from the JCF on the line xi·lambda = z.
    Restore {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        xi1: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi2: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Sweep z on the segment to this end point, one CSV row per step.
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Sampled negative squares of the Schur kernel of a colligation.
    NegSquares {
        file: String,
        #[arg(long, default_value_t = 4)]
        trials: usize,
    },
    /// J-unitary colligation from a Schur part and Blaschke zeros.
    Realize { file: String },
    /// Couple two vessels (first file acts first).
    Couple { first: String, second: String },
    /// Split a vessel along its last `trailing` state coordinates.
    Decompose {
        file: String,
        #[arg(long)]
        trailing: usize,
    },
    /// Zero-input trajectory on a (t1, t2) grid.
    Simulate {
        file: String,
        /// Range `start,end` of t1.
        #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
        t1: String,
        /// Range `start,end` of t2.
        #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
        t2: String,
        /// Grid points per axis.
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
    /// Discriminant polynomial coefficients.
    Discriminant {
        file: String,
        #[arg(long, value_enum, default_value_t = SideArg::Input)]
        side: SideArg,
    },
}

/// Exit code and the bytes written to stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn input_error(code: &str, detail: impl Into<String>) -> Outcome {
    let v = json!({"error": code, "detail": detail.into()});
    Outcome { code: EXIT_INPUT, stdout: vessel_core::io::canonical_json(&v) + "\n" }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: e.to_string() }
                }
                _ => input_error("UsageError", e.to_string().trim().to_string()),
            };
        }
    };
    let requested = if cli.csv { Some("csv".to_string()) } else { cli.format.clone() };
    let format = match requested.as_deref().map(str::parse::<Format>).transpose() {
        Ok(f) => f,
        Err(e) => return input_error("UnsupportedFormat", e.to_string()),
    };
    match commands::dispatch(&cli) {
        Ok(rep) => {
            let fmt = format.unwrap_or(rep.default_format);
            let body = match (fmt, &rep.table) {
                (Format::Csv, Some(t)) => t,
                _ => &rep.body,
            };
            match emit(body, fmt) {
                Ok(text) => Outcome { code: if rep.pass { EXIT_OK } else { EXIT_FAIL }, stdout: text },
                Err(e) => input_error("UnsupportedFormat", e.to_string()),
            }
        }
        Err(e) => input_error(e.code(), e.to_string()),
    }
}
