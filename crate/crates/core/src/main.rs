fn main() {
    let code = conespec::cli::main_entry();
    std::process::exit(code);
}
