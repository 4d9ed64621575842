fn main() {
    std::process::exit(hpd::cli::run(std::env::args_os()));
}
