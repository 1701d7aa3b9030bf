fn main() {
    std::process::exit(genpos::cli::run(std::env::args_os()));
}
