use std::process::ExitCode;

fn main() -> ExitCode {
    gectool::cli::main()
}
