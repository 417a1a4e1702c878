fn main() {
    std::process::exit(mwgate_cli::run(std::env::args_os()));
}
