fn main() {
    std::process::exit(sparqln3::cli::main());
}
