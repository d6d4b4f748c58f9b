fn main() {
    std::process::exit(skl_cli::cli_main(std::env::args_os()));
}
