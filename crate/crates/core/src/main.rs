fn main() {
    std::process::exit(walshvp::cli::run(std::env::args_os()));
}
