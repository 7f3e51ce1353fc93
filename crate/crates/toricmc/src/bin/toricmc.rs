fn main() {
    std::process::exit(toricmc::cli::run());
}
