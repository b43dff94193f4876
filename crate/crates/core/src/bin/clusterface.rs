fn main() {
    std::process::exit(clusterface::cli::run_command(std::env::args_os()));
}
