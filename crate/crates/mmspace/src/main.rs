fn main() -> std::process::ExitCode {
    mmspace::cli::main()
}
