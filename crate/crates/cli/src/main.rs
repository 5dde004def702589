fn main() {
    std::process::exit(tangent_spde_cli::run(std::env::args_os()));
}
