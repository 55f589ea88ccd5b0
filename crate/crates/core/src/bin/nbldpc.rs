fn main() {
    std::process::exit(nbldpc::cli::run(std::env::args_os()));
}
