fn main() {
    env_logger::init();
    std::process::exit(rankwatch::cli::dispatch(std::env::args_os()));
}
