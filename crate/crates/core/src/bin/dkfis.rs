fn main() {
    std::process::exit(dkfis::cli::cli_main(std::env::args_os()));
}
