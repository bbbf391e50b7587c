fn main() {
    std::process::exit(thickness_lab::cli::main_with_args(std::env::args_os()));
}
