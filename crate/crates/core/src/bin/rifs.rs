fn main() {
    std::process::exit(rifs_core::cli::run(std::env::args_os()));
}
