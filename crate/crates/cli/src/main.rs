// `!(x < y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format, OutputArgs};
use commands::Product;

fn emit(product: &Product, out: &OutputArgs, default: Format) -> kacmat::error::Result<()> {
    let mut w = io::open_output(out.output.as_deref())?;
    match out.format.unwrap_or(default) {
        Format::Csv => io::write_table(&mut w, &product.csv),
        Format::Json => io::write_json(&mut w, &product.json),
    }
}

fn run(cli: Cli) -> kacmat::error::Result<bool> {
    let (product, out, default) = match cli.command {
        Command::Sample(a) => {
            let out = a.out.clone();
            (commands::sample(a)?, out, Format::Csv)
        }
        Command::KacRoots(a) => {
            let out = a.out.clone();
            (commands::kac_roots(a)?, out, Format::Csv)
        }
        Command::Density(a) => {
            let out = a.out.clone();
            (commands::density(a)?, out, Format::Csv)
        }
        Command::Rho2(a) => {
            let out = a.out.clone();
            (commands::rho2(a)?, out, Format::Csv)
        }
        Command::Hole(a) => {
            let out = a.out.clone();
            (commands::hole(a)?, out, Format::Csv)
        }
        Command::Oracle(a) => {
            let out = a.out.clone();
            (commands::oracle(a)?, out, Format::Csv)
        }
        Command::Validate(a) => {
            let out = a.out.clone();
            (commands::validate(a)?, out, Format::Json)
        }
        Command::Sumrule(a) => {
            let out = a.out.clone();
            (commands::sumrule(a)?, out, Format::Json)
        }
        Command::Compare(a) => {
            let out = OutputArgs {
                format: Some(Format::Json),
                output: a.output.clone(),
            };
            (commands::compare_saved(a)?, out, Format::Json)
        }
    };
    emit(&product, &out, default)?;
    if !product.pass {
        eprintln!("statistical check failed");
    }
    Ok(product.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
