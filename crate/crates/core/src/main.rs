fn main() {
    std::process::exit(duffing::cli::run(std::env::args_os()));
}
