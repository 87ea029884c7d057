fn main() { std::process::exit(fcstar::cli::main_entry()); }
