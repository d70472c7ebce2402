fn main() {
    std::process::exit(conecat::cli::run(std::env::args_os()));
}
