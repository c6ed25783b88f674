use clap::Parser;

use pushsplit_core::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
