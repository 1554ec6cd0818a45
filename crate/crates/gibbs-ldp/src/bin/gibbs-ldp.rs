fn main() {
    std::process::exit(gibbs_ldp::cli::run(std::env::args_os()));
}
