fn main() {
    std::process::exit(duality::cli::main_with_args(std::env::args_os()));
}
