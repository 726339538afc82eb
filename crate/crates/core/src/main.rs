fn main() {
    std::process::exit(sinecap::cli::run(std::env::args_os()));
}
