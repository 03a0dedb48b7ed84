fn main() -> std::process::ExitCode {
    blowdown::cli::main()
}
