fn main() {
    std::process::exit(opsysdual_cli::run(std::env::args_os()));
}
