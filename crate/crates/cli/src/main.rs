fn main() {
    std::process::exit(rsabench_cli::run());
}
