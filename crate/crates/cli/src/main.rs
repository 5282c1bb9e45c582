use boxlab_cli::{run, Cli};
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            let _ = std::io::stdout().flush();
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("boxlab: {e}");
            ExitCode::from(2)
        }
    }
}
