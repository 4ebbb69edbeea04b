use std::process::ExitCode;

fn main() -> ExitCode {
    qi_opa::cli::main_with_args(std::env::args_os())
}
