fn main() {
    std::process::exit(pmstat::cli::dispatch(std::env::args_os()));
}
