fn main() {
    std::process::exit(minmax_lab::cli::run(std::env::args_os()));
}
