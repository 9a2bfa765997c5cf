fn main() {
    std::process::exit(albanese::cli::main_with_args(std::env::args_os()));
}
