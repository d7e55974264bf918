fn main() {
    std::process::exit(motzkin::cli::run(std::env::args_os()));
}
