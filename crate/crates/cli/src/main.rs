use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = epscap_cli::run_from_args(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
