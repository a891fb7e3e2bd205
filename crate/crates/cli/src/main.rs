fn main() {
    std::process::exit(hardyshift_cli::main_with_args(std::env::args_os()));
}
