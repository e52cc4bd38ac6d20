use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cluster_bounds_cli::{run, Cli};

const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_ERROR } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.output.as_bytes());
            let _ = out.flush();
            ExitCode::from(report.status.exit_code(cli.global.strict))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
