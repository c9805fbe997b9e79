fn main() {
    std::process::exit(elliptic_identities::cli::run(std::env::args_os()));
}
