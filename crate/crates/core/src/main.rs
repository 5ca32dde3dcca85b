fn main() {
    std::process::exit(lightfront::cli::run(std::env::args_os()));
}
