fn main() {
    std::process::exit(cp_swamp::cli::run());
}
