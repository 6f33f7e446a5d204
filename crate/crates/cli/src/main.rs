fn main() {
    std::process::exit(kglab::main_with(std::env::args_os()));
}
