fn main() {
    std::process::exit(sddsolve::cli::run(std::env::args_os()));
}
