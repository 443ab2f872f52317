// SPDX-License-Identifier: Apache-2.0

//! `orbitforge` command-line front end.

mod args;
mod commands;
mod input;
mod report;
mod svg;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let output = cli.global.output.clone();
    let rendered = commands::run(cli.global, cli.verb);
    let written = if output == "-" {
        std::io::stdout().lock().write_all(rendered.text.as_bytes())
    } else {
        std::fs::write(&output, &rendered.text)
    };
    if let Err(e) = written {
        eprintln!("orbitforge: cannot write {output}: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(rendered.exit_code)
}
