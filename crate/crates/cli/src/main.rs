//! `seshadri`: exact certification of the finite computations behind the
//! rationality of Seshadri constants on blow-ups of the plane.

mod cache;
mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Output;
use crate::config::{Format, Overrides, RRange, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "seshadri",
    version,
    about = "Exact critical-pair enumeration, region certificates and rationality classification for Seshadri constants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format [default: markdown for `table`, json otherwise]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Directory for cached reports
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Maximum bisection depth for region certificates
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Square roots are enclosed to width 2^-k
    #[arg(long, global = true)]
    sqrt_width_exponent: Option<u32>,
    /// Worker threads for per-r work
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Add 6-digit decimal hints next to exact values
    #[arg(long, global = true)]
    approx: bool,
    /// Directory for per-r reports and certificates
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// `key = value` settings file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Critical pairs in the five-column table layout
    Table {
        #[arg(long)]
        r: RRange,
        #[arg(long)]
        mu0: Option<String>,
    },
    /// Check every critical pair against the threshold (plus the large-r bounds)
    Verify {
        #[arg(long)]
        r: RRange,
        #[arg(long)]
        mu0: Option<String>,
    },
    /// Critical pairs with their verdicts
    Enumerate {
        #[arg(long)]
        r: RRange,
        #[arg(long)]
        mu0: Option<String>,
    },
    /// Certify Q(m, t0) < 0 over the band and write the certificate
    Region {
        #[arg(long)]
        r: i64,
        #[arg(long)]
        t0: i64,
    },
    /// Rationality verdict for eps(L(mu))
    Classify {
        #[arg(long)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
    },
    /// Chain the catalog loci across the target range
    Coverage {
        #[arg(long)]
        r: RRange,
    },
    /// Re-check a region certificate from scratch
    AuditCertificate { path: PathBuf },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let overrides = Overrides {
        format: cli.format,
        cache_dir: cli.cache_dir,
        depth: cli.depth,
        sqrt_width_exponent: cli.sqrt_width_exponent,
        jobs: cli.jobs,
        approx: cli.approx.then_some(true),
        out_dir: cli.out_dir,
    };
    let env = |k: &str| std::env::var(k).ok();
    let resolve = |range: RRange, default_format| {
        RunConfig::resolve(range, &overrides, cli.config.as_deref(), &env, default_format)
    };
    let single = |r| RRange { min: r, max: r };
    match &cli.command {
        Command::Table { r, mu0 } => commands::table(&resolve(*r, Format::Markdown)?, mu0.as_deref()),
        Command::Verify { r, mu0 } => commands::verify(&resolve(*r, Format::Json)?, mu0.as_deref()),
        Command::Enumerate { r, mu0 } => commands::enumerate(&resolve(*r, Format::Json)?, mu0.as_deref()),
        Command::Region { r, t0 } => commands::region(&resolve(single(*r), Format::Json)?, *r, *t0),
        Command::Classify { r, mu } => commands::classify_cmd(&resolve(single(*r), Format::Json)?, *r, mu),
        Command::Coverage { r } => commands::coverage(&resolve(*r, Format::Json)?),
        Command::AuditCertificate { path } => commands::audit(&resolve(single(0), Format::Json)?, path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            let _ = std::io::stdout().flush();
            out.status.into()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.status.into()
        }
    }
}
