fn main() {
    std::process::exit(aloha_corr::cli::run(std::env::args_os()));
}
