fn main() {
    std::process::exit(vanhove::cli::run(std::env::args_os()));
}
