fn main() {
    std::process::exit(anker_rank::cli::main());
}
