fn main() {
    // Placeholder until the CLI module lands.
    eprintln!("tropex: not yet wired up");
    std::process::exit(1);
}
