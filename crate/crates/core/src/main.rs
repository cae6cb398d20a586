fn main() {
    std::process::exit(corefair::cli::main());
}
