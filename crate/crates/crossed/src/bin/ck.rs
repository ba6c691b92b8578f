fn main() {
    std::process::exit(crossed::cli::main_with_args(std::env::args_os()));
}
