fn main() {
    std::process::exit(reibench::cli::run(std::env::args_os()));
}
