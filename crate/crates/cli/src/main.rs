fn main() {
    std::process::exit(chartforge_cli::run(std::env::args_os()));
}
