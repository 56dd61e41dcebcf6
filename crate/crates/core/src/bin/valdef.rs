fn main() {
    std::process::exit(valdef::cli::run(std::env::args_os()));
}
