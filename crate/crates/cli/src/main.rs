fn main() {
    std::process::exit(laborcurve_cli::main_with_args(std::env::args_os()));
}
