use clap::Parser;
use polychan_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
