fn main() {
    std::process::exit(subsonic_cli::run_cli(std::env::args_os()));
}
