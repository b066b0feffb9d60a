fn main() {
    std::process::exit(boolskel::cli::main_with_args(std::env::args_os()));
}
