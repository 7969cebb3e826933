fn main() {
    std::process::exit(rpsp::cli::main());
}
