fn main() {
    std::process::exit(mmwave_regime::cli::run(std::env::args_os()));
}
