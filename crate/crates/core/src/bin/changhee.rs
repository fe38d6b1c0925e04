fn main() {
    changhee::cli::main()
}
