fn main() {
    std::process::exit(eigenlevel_cli::run(std::env::args_os()));
}
