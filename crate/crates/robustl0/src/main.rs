use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(robustl0::cli::run(std::env::args_os()))
}
