fn main() {
    std::process::exit(mtz::cli::run(std::env::args_os()));
}
