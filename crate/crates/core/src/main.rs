fn main() {
    std::process::exit(sonoskill::cli::run(std::env::args_os()));
}
