fn main() {
    std::process::exit(bispectral::cli::main_with_args(std::env::args_os()));
}
