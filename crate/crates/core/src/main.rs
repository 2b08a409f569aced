fn main() {
    std::process::exit(fgkit::cli::main_with_args(std::env::args_os()));
}
