fn main() {
    std::process::exit(chargequbit::harness::cli::main_with_args(
        std::env::args_os(),
    ));
}
