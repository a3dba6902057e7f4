fn main() {
    std::process::exit(epbound::cli::run_cli(std::env::args_os()));
}
