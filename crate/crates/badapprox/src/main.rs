fn main() {
    std::process::exit(badapprox::cli::run());
}
