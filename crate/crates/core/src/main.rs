fn main() {
    std::process::exit(diffalg::cli::main_with_args(std::env::args_os()));
}
