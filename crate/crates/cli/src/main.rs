use std::panic;
use std::process::ExitCode;

use clap::Parser as _;
use extlab_cli::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match panic::catch_unwind(|| extlab_cli::run(cli)) {
        Ok(Ok(status)) => ExitCode::from(status.exit_code()),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(1)
        }
    }
}
