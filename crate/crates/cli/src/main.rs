use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dqd_cli::commands::{run, Command, Invocation};

#[derive(Parser)]
#[command(name = "dqd", version, about = "Double-dot qubits coupled through a transmission-line resonator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Resonator, qubit and coupling quantities derived from the device section
    Device(Args),
    /// EPR-pair generation under relaxation and dephasing
    Epr(Args),
    /// Error probability over a grid of relaxation and dephasing rates
    Sweep(Args),
    /// Cavity-resolved model against the dispersive reduction
    Validate(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output file; a normalized config is written beside it
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all available cores)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Device(a) => (Command::Device, a),
        Cmd::Epr(a) => (Command::Epr, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Validate(a) => (Command::Validate, a),
    };
    let outcome = run(&Invocation {
        command,
        config: args.config,
        out: args.out,
        threads: args.threads.map(|n| n as usize),
    });
    print!("{}", outcome.report);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
