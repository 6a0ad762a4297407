use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(virasoro_cli::run(std::env::args_os()))
}
