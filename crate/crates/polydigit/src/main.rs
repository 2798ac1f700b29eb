use std::process::exit;

fn main() {
    exit(polydigit::cli::main_entry());
}
