fn main() {
    std::process::exit(gmnl_cli::run(std::env::args_os()));
}
