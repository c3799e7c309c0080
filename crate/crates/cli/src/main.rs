fn main() {
    std::process::exit(daisen::run(std::env::args_os()));
}
