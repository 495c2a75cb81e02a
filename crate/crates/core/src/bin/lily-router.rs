fn main() {
    std::process::exit(lily_router::cli::run(std::env::args_os()));
}
