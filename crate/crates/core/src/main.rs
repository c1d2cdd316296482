use std::io;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QVP_LOG", "warn")).init();
    let code = qvp_core::cli::main_with_args(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
