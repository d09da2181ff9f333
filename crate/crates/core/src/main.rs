use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = zhstance::cli::run(std::env::args_os(), &mut stdin.lock(), &mut out, &mut io::stderr());
    if out.flush().is_err() && code == 0 {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
