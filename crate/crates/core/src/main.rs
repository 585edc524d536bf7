fn main() {
    std::process::exit(levyspec::cli::main_with_args(std::env::args_os()));
}
