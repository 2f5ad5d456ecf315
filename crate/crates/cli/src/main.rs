use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::Outcome;

/// Kazhdan-Lusztig tables, cells and asymptotic rings of low-rank Weyl groups.
#[derive(Parser)]
#[command(name = "klcells", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Kazhdan-Lusztig table of a ball and write it to a cache file.
    Compute {
        #[arg(long = "type")]
        label: String,
        #[arg(long)]
        radius: usize,
        /// Include the length-zero elements of the extended group.
        #[arg(long)]
        extended: bool,
        #[arg(long)]
        cache: PathBuf,
    },
    /// Left, right and two-sided cells with a-values and the stabilization diagnostic.
    Cells {
        #[arg(long)]
        cache: PathBuf,
        /// Write the order on two-sided cells as a DOT graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// a-values per cell with certification status.
    Afn {
        #[arg(long)]
        cache: PathBuf,
    },
    #[command(subcommand)]
    Verify(Verify),
    /// Match cells with nilpotent orbits and check that the orders agree.
    Bijection {
        #[arg(long = "type")]
        label: String,
        #[arg(long)]
        cache: PathBuf,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Closure of the ideal spanned by the C_w below a cell.
    Ideal {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long = "cell-rep")]
        cell_rep: String,
    },
    /// Multiplicativity of phi_c on sampled pairs.
    Phi {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long = "cell-rep")]
        cell_rep: String,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Outcome::Usage.code() } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Compute { label, radius, extended, cache } => commands::compute(&label, radius, extended, &cache),
        Command::Cells { cache, dot } => commands::cells(&cache, dot.as_deref()),
        Command::Afn { cache } => commands::afn(&cache),
        Command::Verify(Verify::Ideal { cache, cell_rep }) => commands::verify_ideal(&cache, &cell_rep),
        Command::Verify(Verify::Phi { cache, cell_rep, samples, seed }) => {
            commands::verify_phi(&cache, &cell_rep, samples, seed)
        }
        Command::Bijection { label, cache } => commands::bijection(&label, &cache),
    };
    match result {
        Ok((report, outcome)) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            // a closed pipe on stdout is not a failure of the command
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(outcome.code())
        }
        Err(e) => {
            eprintln!("error: {}", e.error);
            ExitCode::from(e.outcome.code())
        }
    }
}
