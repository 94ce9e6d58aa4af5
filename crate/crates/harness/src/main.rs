fn main() {
    std::process::exit(moco_harness::cli::run(std::env::args_os()));
}
