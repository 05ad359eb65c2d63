use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(squeezed_dynamics::cli::run(std::env::args_os()))
}
