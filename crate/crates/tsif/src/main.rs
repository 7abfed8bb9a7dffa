fn main() {
    std::process::exit(tsif::cli::main_with_args());
}
