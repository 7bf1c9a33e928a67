fn main() {
    std::process::exit(coorbit_cli::run(std::env::args_os()));
}
