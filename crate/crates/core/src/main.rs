fn main() {
    std::process::exit(hillspec::cli::main_entry(std::env::args_os()));
}
