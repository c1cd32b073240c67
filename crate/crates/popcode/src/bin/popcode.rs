fn main() {
    std::process::exit(popcode::cli::run());
}
