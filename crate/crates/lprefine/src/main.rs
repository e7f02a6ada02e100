fn main() {
    std::process::exit(lprefine::cli::main());
}
