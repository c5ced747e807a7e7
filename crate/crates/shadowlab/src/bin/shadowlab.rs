fn main() {
    std::process::exit(shadowlab::harness::run_cli(std::env::args_os()));
}
