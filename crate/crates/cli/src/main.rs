use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use platelab_cli::{parse_threads, run, Cli, EXIT_USAGE, THREADS_ENV};

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("platelab: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn print_stdout(text: &str) -> io::Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match parse_threads(std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                return usage_error(e);
            }
        }
        Ok(None) => {}
        Err(e) => return usage_error(e),
    }
    let output = match run(cli.command, &cli.options) {
        Ok(o) => o,
        Err(e) => return usage_error(e),
    };
    let text = serde_json::to_string_pretty(&output.json).expect("JSON output serializes");
    let csv_target = cli
        .options
        .out
        .as_ref()
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")));
    let written = match (&cli.options.out, csv_target) {
        (_, Some(path)) => match &output.csv {
            Some(csv) => fs::write(path, csv).and_then(|_| print_stdout(&text)),
            None => return usage_error(format!("{} has no CSV output", cli.command.name())),
        },
        (Some(path), None) => fs::write(path, format!("{text}\n")),
        (None, None) => print_stdout(&text),
    };
    if let Err(e) = written {
        return usage_error(e);
    }
    if !output.passed {
        eprintln!("platelab: {} reported failing checks", cli.command.name());
    }
    ExitCode::from(output.exit_code())
}
