fn main() {
    std::process::exit(fishsim::cli::main_with(std::env::args_os()));
}
