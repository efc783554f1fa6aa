fn main() {
    std::process::exit(gasched::cli::main_with_args(std::env::args_os()));
}
