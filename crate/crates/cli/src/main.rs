use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use localsft_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("error: USAGE: {first}");
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let outcome = run(&cli);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.report.render(cli.format).as_bytes());
    let _ = stdout.flush();
    if let Some(e) = &outcome.failure {
        eprintln!("{}", e.line());
    }
    ExitCode::from(outcome.exit_code() as u8)
}
