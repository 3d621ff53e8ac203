fn main() {
    std::process::exit(confetti::cli::run(std::env::args_os()));
}
