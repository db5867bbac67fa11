fn main() {
    std::process::exit(born_kernel::cli::run());
}
