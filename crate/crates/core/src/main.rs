fn main() {
    std::process::exit(silva::cli::run(std::env::args_os()));
}
