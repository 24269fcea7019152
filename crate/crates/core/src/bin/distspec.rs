fn main() {
    std::process::exit(distspec::cli::run(std::env::args_os()));
}
