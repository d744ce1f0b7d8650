fn main() {
    std::process::exit(mcpqe::cli::main_with_args(std::env::args_os()));
}
