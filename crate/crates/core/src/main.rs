fn main() {
    std::process::exit(nildyn::cli::run(std::env::args().collect()));
}
