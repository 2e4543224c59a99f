fn main() {
    std::process::exit(glottogrid::cli::main());
}
