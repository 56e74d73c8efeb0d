fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    mhd_cli::init_threads();
    std::process::exit(mhd_cli::cli_main(std::env::args_os()));
}
