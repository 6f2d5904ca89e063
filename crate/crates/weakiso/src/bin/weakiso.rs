fn main() {
    std::process::exit(weakiso::cli::main());
}
