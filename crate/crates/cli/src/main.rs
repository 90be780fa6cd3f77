//! Command-line front end over the library: Lambert W tables, sequence
//! condition checks, associated-function sweeps with envelope verification,
//! bump construction and spectrum dumps, and directional decay
//! classification.
//!
//! Exit codes: 0 all checks pass / report produced, 1 a verification found
//! violations, 2 usage or domain error.

mod cmd_assoc;
mod cmd_bump;
mod cmd_lambert;
mod cmd_seq;
mod cmd_wf;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(
    name = "extgevrey",
    version,
    about = "Associated-function asymptotics, envelope verification and decay classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Worker threads for sweeps; the output is byte-identical regardless
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the principal Lambert W branch with its logarithmic bracket
    Lambert(cmd_lambert::LambertArgs),
    /// Defining-sequence inequality checks and constant fits
    Seq {
        #[command(subcommand)]
        cmd: cmd_seq::SeqCmd,
    },
    /// The associated function: values, bound reports, envelope verification
    Assoc {
        #[command(subcommand)]
        cmd: cmd_assoc::AssocCmd,
    },
    /// Iterated-convolution bumps and their exact spectra
    Bump {
        #[command(subcommand)]
        cmd: cmd_bump::BumpCmd,
    },
    /// Directional decay classification of localized signals
    Wf {
        #[command(subcommand)]
        cmd: cmd_wf::WfCmd,
    },
}

pub(crate) struct Ctx {
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
    {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let ctx = Ctx {
        format: cli.format,
        out: cli.out,
    };
    let result = match cli.command {
        Command::Lambert(args) => cmd_lambert::run(args, &ctx),
        Command::Seq { cmd } => cmd_seq::run(cmd, &ctx),
        Command::Assoc { cmd } => cmd_assoc::run(cmd, &ctx),
        Command::Bump { cmd } => cmd_bump::run(cmd, &ctx),
        Command::Wf { cmd } => cmd_wf::run(cmd, &ctx),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
