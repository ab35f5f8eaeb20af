fn main() {
    std::process::exit(relay_secrecy::cli::run(std::env::args_os()));
}
