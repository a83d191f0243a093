fn main() {
    std::process::exit(clockham::cli::run(std::env::args_os()));
}
