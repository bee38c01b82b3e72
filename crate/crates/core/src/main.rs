fn main() {
    std::process::exit(supercpn::cli::main_entry());
}
