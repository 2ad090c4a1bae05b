use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = bipoly::cli::Cli::parse();
    let stdout = std::io::stdout();
    match bipoly::cli::run(cli, &mut stdout.lock()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(bipoly::cli::exit_code(&e))
        }
    }
}
