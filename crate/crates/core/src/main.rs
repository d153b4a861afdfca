fn main() {
    std::process::exit(cycleset::cli::run(std::env::args_os()));
}
