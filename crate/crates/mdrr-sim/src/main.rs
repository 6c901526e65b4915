fn main() {
    std::process::exit(mdrr_sim::cli::main());
}
