fn main() -> std::process::ExitCode {
    polysim::cli::run(std::env::args_os())
}
