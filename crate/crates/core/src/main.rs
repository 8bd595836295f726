fn main() {
    std::process::exit(thermowitness::cli::run_from_args(std::env::args_os()));
}
