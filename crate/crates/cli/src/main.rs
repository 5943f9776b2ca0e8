use std::process::ExitCode;

use clap::Parser;
use privdist::{execute, write_outputs, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // Help and version requests are not failures; usage errors are
            // validation failures, not certificate failures.
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let config = RunConfig::from(cli);
    let result = execute(&config).and_then(|output| {
        write_outputs(&config, &output)?;
        Ok(output.status)
    });
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
