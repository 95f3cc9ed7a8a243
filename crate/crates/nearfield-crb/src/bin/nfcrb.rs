fn main() {
    std::process::exit(nearfield_crb::cli::main_exit_code());
}
