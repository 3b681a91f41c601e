use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qmoons_cli::run() as u8)
}
