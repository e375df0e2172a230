fn main() {
    std::process::exit(caledonia::cli::main_with(std::env::args_os()));
}
