fn main() {
    std::process::exit(transversal_cli::run(std::env::args_os()));
}
