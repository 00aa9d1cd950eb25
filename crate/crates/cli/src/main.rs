fn main() {
    std::process::exit(rearrange::run(std::env::args_os()));
}
