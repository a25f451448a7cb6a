use std::process;

fn main() {
    process::exit(manet_flood::cli::cli_main(std::env::args_os()));
}
