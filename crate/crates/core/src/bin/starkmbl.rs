fn main() {
    std::process::exit(starkmbl::cli::main_with_args(std::env::args_os()));
}
