fn main() -> std::process::ExitCode {
    descents::cli::main_with_args(std::env::args_os())
}
