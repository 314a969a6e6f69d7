fn main() {
    std::process::exit(fglab::cli::main());
}
