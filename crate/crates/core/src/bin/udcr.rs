fn main() {
    std::process::exit(udcr::cli::run(std::env::args_os()));
}
