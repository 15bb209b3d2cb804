fn main() {
    std::process::exit(permatrellis::cli::main_with_args(std::env::args_os()));
}
