fn main() {
    std::process::exit(twogroups_cli::run(std::env::args_os()));
}
