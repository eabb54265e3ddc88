fn main() {
    std::process::exit(liesym::cli::main_with_args(std::env::args_os()));
}
