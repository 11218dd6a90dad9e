fn main() {
    std::process::exit(jensen_cli::run_cli(std::env::args_os()));
}
