fn main() {
    std::process::exit(cnoma_sim::cli::run(std::env::args_os()));
}
