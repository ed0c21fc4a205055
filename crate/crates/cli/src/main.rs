fn main() {
    std::process::exit(ym2_cli::run(std::env::args_os()));
}
