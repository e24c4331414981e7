use clap::Parser;

use curesurv_cli::{run_with_threads, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run_with_threads(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
