fn main() { std::process::exit(matterwave::cli::run(std::env::args_os())); }
