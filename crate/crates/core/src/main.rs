fn main() {
    std::process::exit(cmdp_core::cli::run(std::env::args_os()));
}
