fn main() {
    std::process::exit(qbafx::cli::run(std::env::args_os()));
}
