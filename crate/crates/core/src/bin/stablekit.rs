fn main() {
    std::process::exit(stablekit::cli::run(std::env::args_os()));
}
