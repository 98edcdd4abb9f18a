mod args;
mod render;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use orthoieq_core::numeric::PrecisionContext;
use orthoieq_core::Error;

use args::{Cli, Command, ModeArg};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_VERIFY: u8 = 4;

fn execute(cli: &Cli) -> Result<run::Outcome, Error> {
    let mut ctx = PrecisionContext::with_precision(cli.precision)?;
    if cli.mode == ModeArg::Exact {
        ctx = ctx.exact();
    }
    match &cli.command {
        Command::Moments { weight, count } => run::cmd_moments(weight, *count, &ctx),
        Command::Poly {
            weight,
            degrees,
            variant,
            no_verify,
        } => run::cmd_poly(weight, degrees, variant, *no_verify, cli.seed, &ctx),
        Command::Verify {
            weight,
            variant,
            degrees,
            poly: None,
            ..
        } => run::cmd_poly(weight, degrees, variant, false, cli.seed, &ctx),
        Command::Verify {
            weight,
            variant,
            poly: Some(poly),
            samples,
            ..
        } => run::cmd_verify(weight, variant, poly, samples, cli.seed, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            let text = render::render(&outcome.records, cli.format);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            if outcome.verification_failed {
                eprintln!("orthoieq: verification failed");
                ExitCode::from(EXIT_VERIFY)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("orthoieq: {e}");
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_NUMERIC })
        }
    }
}
