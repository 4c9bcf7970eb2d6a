fn main() {
    std::process::exit(spidernet::cli::run(std::env::args_os()));
}
