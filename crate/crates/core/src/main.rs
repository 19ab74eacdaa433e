fn main() {
    std::process::exit(ucorr::cli::run(std::env::args_os()));
}
