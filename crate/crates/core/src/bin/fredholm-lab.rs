fn main() -> std::process::ExitCode {
    fredholm_lab::cli::main()
}
