fn main() {
    std::process::exit(vrlab::cli::dispatch(std::env::args().collect()));
}
