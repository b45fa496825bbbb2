fn main() {
    std::process::exit(gpme::cli::run(std::env::args_os()));
}
