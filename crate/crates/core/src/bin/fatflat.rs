fn main() {
    std::process::exit(fatflat::cli::run(std::env::args_os()));
}
