use std::process::ExitCode;

fn main() -> ExitCode {
    ssllab_cli::main_with_args(std::env::args_os())
}
