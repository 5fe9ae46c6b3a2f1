fn main() {
    std::process::exit(unrollsem::cli::run(std::env::args_os()));
}
