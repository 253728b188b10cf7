fn main() {
    nwidth::lab::cli::main()
}
