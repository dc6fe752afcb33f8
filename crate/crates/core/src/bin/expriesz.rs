fn main() {
    std::process::exit(expriesz::cli::main_entry());
}
