fn main() {
    std::process::exit(ellzeta::cli::run(std::env::args_os()));
}
