// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = wentro::cli::Cli::parse();
    std::process::exit(wentro::cli::run(cli));
}
