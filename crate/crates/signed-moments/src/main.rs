use std::process::exit;

fn main() {
    exit(signed_moments::cli::run(std::env::args()));
}
