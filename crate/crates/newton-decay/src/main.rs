fn main() {
    std::process::exit(newton_decay::cli::main_with_args(std::env::args_os()));
}
