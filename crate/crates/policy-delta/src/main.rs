fn main() {
    std::process::exit(policy_delta::cli::run());
}
