fn main() {
    // Placeholder until the CLI module lands.
}
