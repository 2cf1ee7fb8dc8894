use anyhow::Context;
use clap::Parser;

use mechlab::cli::{execute, Cli};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    execute(&cli).context("mechlab failed")
}
