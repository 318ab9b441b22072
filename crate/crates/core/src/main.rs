fn main() {
    let code = variaccel::cli::main_with_args(std::env::args_os(), std::io::stdout().lock(), std::io::stderr().lock());
    std::process::exit(code);
}
