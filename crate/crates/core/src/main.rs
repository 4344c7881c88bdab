fn main() {
    std::process::exit(lineuler::cli::main());
}
