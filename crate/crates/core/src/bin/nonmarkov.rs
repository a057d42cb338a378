use std::path::PathBuf;

use clap::{Parser, Subcommand};

use nonmarkov::cli;

#[derive(Parser)]
#[command(name = "nonmarkov", version, about = "Non-Markovianity measures for two dephasing qubits")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Run the identity and special-function check suites.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    let code = match Args::parse().command {
        Command::Run { config } => cli::run(&config),
        Command::Check { seed, samples, output } => cli::check(seed, samples, output.as_deref()),
    };
    std::process::exit(code);
}
