fn main() -> std::process::ExitCode {
    cama::cli::main()
}
