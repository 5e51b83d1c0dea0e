fn main() {
    std::process::exit(dragonking::cli::run(std::env::args_os()));
}
