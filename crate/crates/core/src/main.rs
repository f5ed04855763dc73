fn main() {
    std::process::exit(wigner_align::cli::run(std::env::args_os()));
}
