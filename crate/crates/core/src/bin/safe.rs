fn main() {
    std::process::exit(safe_fem::cli::main_with_args(std::env::args_os()));
}
