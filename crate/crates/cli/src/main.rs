mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => return usage_error(e),
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn usage_error(e: clap::Error) -> ExitCode {
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = e.print();
        return ExitCode::SUCCESS;
    }
    let text = e.to_string();
    eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
    ExitCode::from(2)
}

fn run(mut command: args::Command) -> Result<u8, Failure> {
    commands::prepare(&mut command)?;
    if let Some(jobs) = command.common().jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--jobs: {e}")))?;
    }
    let outcome = commands::execute(&command)?;
    let envelope = report::Envelope::new(&command, outcome.payload);
    report::emit(&envelope, &outcome.table, command.common())?;
    Ok(if outcome.failed { 1 } else { 0 })
}
