fn main() {
    std::process::exit(lbsda::cli::run_cli(std::env::args_os()));
}
