fn main() {
    std::process::exit(monogamy::cli::main_with_args(std::env::args_os()));
}
