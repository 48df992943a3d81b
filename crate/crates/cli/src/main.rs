//! `stabkit`: queries on geometric stability conditions of surfaces.
//!
//! Exit codes: 0 answer or pass, 1 negative verdict, 2 input error,
//! 3 budget exhausted or result not certifiable.

// Argument enums are built once per process.
#![allow(clippy::large_enum_variant)]

mod args;
mod commands;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use args::List;
use clap::{Args, Parser, Subcommand};
use stabkit::Rational;

#[derive(Parser)]
#[command(
    name = "stabkit",
    version,
    about = "Exact invariants of stability conditions on surfaces"
)]
pub struct Cli {
    /// Surface definition file (or the name of a bundled one).
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    /// Quotient definition file (or the name of a bundled one).
    #[arg(long, global = true)]
    pub quotient: Option<PathBuf>,
    /// Write tabular output to this CSV file.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Write a plot to this SVG file.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for sweeps and enumerations.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on enumerated candidates and on cone faces visited.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Surface data.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Le Potier function.
    #[command(subcommand)]
    Lp(LpCmd),
    /// Central charges.
    #[command(subcommand)]
    Charge(ChargeCmd),
    /// Support-property certificate.
    #[command(subcommand)]
    Support(SupportCmd),
    /// Geometric chamber.
    #[command(subcommand)]
    Chamber(ChamberCmd),
    /// Free quotients.
    #[command(subcommand)]
    Quotient(QuotientCmd),
    /// Chern characters.
    #[command(subcommand)]
    Chern(ChernCmd),
}

#[derive(Subcommand)]
pub enum SurfaceCmd {
    /// Print the lattice, cones and provider.
    Show,
    /// List the bundled example configs.
    Gallery,
}

/// `H` and `B` on the command line.
#[derive(Args, Clone)]
pub struct Polarization {
    /// Ample class, comma-separated rationals.
    #[arg(long = "H", value_parser = args::vector_arg, allow_hyphen_values = true)]
    pub h: Option<List<Rational>>,
    /// B-field, comma-separated rationals; zero when omitted.
    #[arg(long = "B", value_parser = args::vector_arg, allow_hyphen_values = true)]
    pub b: Option<List<Rational>>,
    /// All of `H,B,alpha,beta` at once, flat or split by `;`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["h", "b"])]
    pub params: Option<String>,
}

#[derive(Args, Clone)]
pub struct Point {
    #[command(flatten)]
    pub pol: Polarization,
    #[arg(long, value_parser = args::rational, allow_hyphen_values = true)]
    pub alpha: Option<Rational>,
    #[arg(long, value_parser = args::rational, allow_hyphen_values = true)]
    pub beta: Option<Rational>,
}

/// A grid, either as `--range lo:hi:step` or as three flags.
#[derive(Args, Clone)]
pub struct Grid {
    #[arg(long, value_parser = args::grid_range, allow_hyphen_values = true, conflicts_with_all = ["from", "to", "step"])]
    pub range: Option<(Rational, Rational, Rational)>,
    #[arg(long, value_parser = args::rational, allow_hyphen_values = true)]
    pub from: Option<Rational>,
    #[arg(long, value_parser = args::rational, allow_hyphen_values = true)]
    pub to: Option<Rational>,
    #[arg(long, value_parser = args::rational)]
    pub step: Option<Rational>,
}

/// Where wall-envelope characters come from.
#[derive(Args, Clone, Default)]
pub struct SourceArgs {
    /// Semi-homogeneous witnesses `r·e^C` with denominators up to this.
    #[arg(long)]
    pub witness_den: Option<u64>,
    /// Box for witness `C`, `lo:hi` per coordinate.
    #[arg(long, value_parser = args::rational_box_arg, allow_hyphen_values = true)]
    pub c_box: Option<List<(Rational, Rational)>>,
    /// Largest rank of enumerated integral characters.
    #[arg(long)]
    pub r_max: Option<u64>,
    /// Integer box for ch1, `lo:hi` per coordinate.
    #[arg(long, value_parser = args::int_box_arg, allow_hyphen_values = true)]
    pub c1_box: Option<List<(i64, i64)>>,
    /// Rational range for ch2, `lo:hi`.
    #[arg(long, value_parser = args::rational_range, allow_hyphen_values = true)]
    pub ch2_range: Option<(Rational, Rational)>,
}

#[derive(Subcommand)]
pub enum LpCmd {
    /// Φ and the Bogomolov–Gieseker bound at given points.
    Eval {
        #[command(flatten)]
        pol: Polarization,
        /// Comma-separated evaluation points.
        #[arg(long, value_parser = args::vector_arg, allow_hyphen_values = true)]
        x: List<Rational>,
    },
    /// Φ on a grid, with a continuity report.
    Scan {
        #[command(flatten)]
        pol: Polarization,
        #[command(flatten)]
        grid: Grid,
    },
}

#[derive(Subcommand)]
pub enum ChargeCmd {
    /// The charge functional, its kernel and optionally `Z(v)`.
    Eval {
        #[command(flatten)]
        point: Point,
        /// Character `r;c1…;s` or `r,c1…,s`.
        #[arg(long = "class", alias = "ch", value_parser = args::character, allow_hyphen_values = true)]
        ch: Option<stabkit::Character>,
    },
}

#[derive(Subcommand)]
pub enum SupportCmd {
    /// Choose δ and ε and certify negative definiteness on the kernel.
    Check {
        #[command(flatten)]
        point: Point,
        /// Use this δ instead of selecting one.
        #[arg(long, value_parser = args::rational)]
        delta: Option<Rational>,
        /// Use this ε instead of selecting one.
        #[arg(long, value_parser = args::rational)]
        epsilon: Option<Rational>,
        /// Also print the full combined form matrix.
        #[arg(long)]
        emit_form: bool,
    },
}

#[derive(Subcommand)]
pub enum ChamberCmd {
    /// Is `(H, B, α, β)` in the geometric chamber?
    Check {
        #[command(flatten)]
        point: Point,
    },
    /// Boundary rows over a β grid.
    Sweep {
        #[command(flatten)]
        pol: Polarization,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        source: SourceArgs,
    },
}

#[derive(Subcommand)]
pub enum QuotientCmd {
    /// Validate a quotient file and spot-check the |G| rescaling.
    Verify {
        /// Quotient file; overrides `--quotient`.
        file: Option<PathBuf>,
        /// Random invariant charges to test.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Induce a charge on the quotient from an invariant one on the cover.
    Induce {
        #[command(flatten)]
        point: Point,
    },
}

#[derive(Subcommand)]
pub enum ChernCmd {
    /// Integral BG-feasible characters in a box.
    Enumerate {
        #[arg(long)]
        r_max: u64,
        #[arg(long, value_parser = args::int_box_arg, allow_hyphen_values = true)]
        c1_box: List<(i64, i64)>,
        #[arg(long, value_parser = args::rational_range, allow_hyphen_values = true)]
        ch2_range: (Rational, Rational),
    },
    /// Twist, slope, ν and discriminant of a character.
    Info {
        #[command(flatten)]
        pol: Polarization,
        #[arg(long = "class", alias = "ch", value_parser = args::character, allow_hyphen_values = true)]
        ch: stabkit::Character,
    },
}

/// Process exit status of a finished command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Negative,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<stabkit::Error>() {
        Some(e) if e.is_budget_or_certification() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
