use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = alphagate_cli::run(
        std::env::args_os(),
        std::env::var(alphagate_cli::SEED_ENV).ok(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
