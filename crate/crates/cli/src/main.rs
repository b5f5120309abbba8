fn main() {
    std::process::exit(cbose_cli::run_command(std::env::args_os()));
}
