use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypar_core::foldctor::{parse_angle, DEFAULT_DIGITS_MAX, DEFAULT_DIGITS_START};
use hypar_core::TriangulationKind;
use num_rational::BigRational;

mod commands;

/// Certified construction and analysis of triangulated hyperbolic-paraboloid foldings.
#[derive(Parser, Debug)]
#[command(name = "hypar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a folding, optionally certify it embedded, and write it out.
    Fold(FoldArgs),
    /// Largest proper n per angle, with the n·θ products.
    LimitsTable(LimitsArgs),
    /// Rings constructible at each fixed precision.
    PrecisionTable(PrecisionArgs),
    /// Lemma checks, sign audit, isometry and mountain-valley faithfulness.
    Audit(AuditArgs),
    /// Diagonal cross-section with per-parity parabolic fits.
    CrossSection(SectionArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Instance {
    /// Triangulation: asym or alt.
    #[arg(long, default_value = "asym")]
    pub kind: TriangulationKind,
    /// Number of rings.
    #[arg(long)]
    pub n: u32,
    /// Central fold angle in degrees: integer, decimal or p/q.
    #[arg(long, value_parser = angle)]
    pub theta: BigRational,
    #[command(flatten)]
    pub precision: Precision,
}

#[derive(Args, Debug, Clone)]
pub struct Precision {
    /// Fixed number of decimal digits.
    #[arg(long, conflicts_with = "auto")]
    pub digits: Option<u32>,
    /// Double the digits after numerical failures (default when --digits is absent).
    #[arg(long)]
    pub auto: bool,
    /// First precision tried by --auto.
    #[arg(long, default_value_t = DEFAULT_DIGITS_START)]
    pub digits_start: u32,
    /// Precision cap for --auto and sweeps.
    #[arg(long, env = "HYPAR_DIGITS_MAX", default_value_t = DEFAULT_DIGITS_MAX)]
    pub digits_max: u32,
}

#[derive(Args, Debug)]
pub struct FoldArgs {
    #[command(flatten)]
    pub instance: Instance,
    /// Certify that no two faces intersect.
    #[arg(long)]
    pub check_embedding: bool,
    /// Fold document (JSON) output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Midpoint mesh (OBJ) output path.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Embedding report (JSON) output path.
    #[arg(long, requires = "check_embedding")]
    pub report: Option<PathBuf>,
    /// Crease pattern (JSON) output path.
    #[arg(long)]
    pub dump_pattern: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[arg(long, default_value = "asym")]
    pub kind: TriangulationKind,
    /// Angles in degrees, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = angle, required = true, num_args = 1..)]
    pub theta: Vec<BigRational>,
    /// Largest n tried per angle.
    #[arg(long, default_value_t = 200)]
    pub n_cap: u32,
    #[arg(long, default_value_t = DEFAULT_DIGITS_START)]
    pub digits_start: u32,
    #[arg(long, env = "HYPAR_DIGITS_MAX", default_value_t = DEFAULT_DIGITS_MAX)]
    pub digits_max: u32,
    /// Angles processed concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Table (JSON) output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PrecisionArgs {
    #[arg(long, default_value = "asym")]
    pub kind: TriangulationKind,
    #[arg(long, value_parser = angle, default_value = "1")]
    pub theta: BigRational,
    /// Digit grid, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256,512,1024,2048")]
    pub digits: Vec<u32>,
    /// Largest n tried per precision.
    #[arg(long, default_value_t = 100)]
    pub n_cap: u32,
    /// Precisions processed concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Fold document to audit instead of constructing one.
    #[arg(long, conflicts_with_all = ["kind", "n", "theta"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<TriangulationKind>,
    #[arg(long, required_unless_present = "input")]
    pub n: Option<u32>,
    #[arg(long, value_parser = angle, required_unless_present = "input")]
    pub theta: Option<BigRational>,
    #[command(flatten)]
    pub precision: Precision,
    /// Digits used for the four-triangle lemma grid.
    #[arg(long, default_value_t = 60)]
    pub lemma_digits: u32,
    /// Audit report (JSON) output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SectionArgs {
    #[arg(long, default_value = "alt")]
    pub kind: TriangulationKind,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = angle)]
    pub theta: BigRational,
    #[command(flatten)]
    pub precision: Precision,
    /// CSV output path (k, u, z, class, fit, abs_dev, rel_dev).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// SVG output prefix: writes PREFIX-section.svg, PREFIX-abs.svg, PREFIX-rel.svg.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn angle(s: &str) -> Result<BigRational, String> {
    parse_angle(s)
}

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const INFEASIBLE: u8 = 3;
    pub const PRECISION_EXHAUSTED: u8 = 4;
    pub const SELF_INTERSECTION: u8 = 5;
    pub const AUDIT_FAILURE: u8 = 6;
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    let code = match cli.command {
        Command::Fold(a) => commands::fold(a),
        Command::LimitsTable(a) => commands::limits_table(a),
        Command::PrecisionTable(a) => commands::precision_table(a),
        Command::Audit(a) => commands::audit(a),
        Command::CrossSection(a) => commands::cross_section(a),
    };
    ExitCode::from(code)
}
