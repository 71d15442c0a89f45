fn main() {
    std::process::exit(multistable_cli::run(std::env::args_os()));
}
