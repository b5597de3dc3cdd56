use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(certoset::cli::run(std::env::args_os()))
}
