fn main() -> std::process::ExitCode {
    coarse_lab::cli::main()
}
