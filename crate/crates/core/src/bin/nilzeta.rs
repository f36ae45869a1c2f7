fn main() {
    std::process::exit(nilzeta::cli::main_with_args(std::env::args_os()));
}
