mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::{Meta, Outputs};

/// Bad flags or configuration; exits with status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<lexiseg::Error>() {
            return if e.is_invariant() { EXIT_INVARIANT } else { EXIT_DATA };
        }
    }
    EXIT_DATA
}

fn run(cli: Cli, out: &mut Outputs) -> anyhow::Result<()> {
    let common = cli.command.common().clone();
    if common.threads == 0 {
        return Err(UsageError("--threads must be at least 1".into()).into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| UsageError(format!("thread pool: {e}")))?;
    let name = cli.command.name();
    pool.install(|| match &cli.command {
        Command::Train(a) => commands::train(a, &Meta::new(name, common.seed, a), out),
        Command::Segment(a) => commands::segment(a, &Meta::new(name, common.seed, a), out),
        Command::Eval(a) => commands::eval(a, &Meta::new(name, common.seed, a), out),
        Command::Stats(a) => commands::stats(a, &Meta::new(name, common.seed, a), out),
        Command::Dl(a) => commands::dl(a, &Meta::new(name, common.seed, a), out),
        Command::Coverage(a) => commands::coverage(a, &Meta::new(name, common.seed, a), out),
        Command::Window(a) => commands::window_cmd(a, &Meta::new(name, common.seed, a), out),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = Outputs::default();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            out.cleanup();
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
