fn main() {
    std::process::exit(exner_core::cli::parse_and_dispatch(std::env::args_os()));
}
