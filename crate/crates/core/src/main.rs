fn main() {
    std::process::exit(dcvortex::cli::run(std::env::args_os()));
}
