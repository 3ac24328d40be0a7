fn main() {
    std::process::exit(pg42::cli::run_from_args(std::env::args_os()));
}
