fn main() {
    let code = quadlab_cli::run(std::env::args().skip(1));
    std::process::exit(code);
}
