fn main() {
    std::process::exit(moutard_lab::cli::run(std::env::args_os()));
}
