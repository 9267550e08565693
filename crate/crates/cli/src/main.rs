use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = asymorph_cli::run_args(std::env::args_os().skip(1));
    if !outcome.output.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(outcome.output.as_bytes());
    }
    if let Some(msg) = outcome.message {
        eprintln!("asymorph: {msg}");
    }
    ExitCode::from(outcome.code as u8)
}
