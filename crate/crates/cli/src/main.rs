fn main() {
    std::process::exit(kitwpa_cli::run(std::env::args_os()));
}
