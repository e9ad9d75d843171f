fn main() {
    std::process::exit(mpsvqe::cli::main(std::env::args_os()));
}
