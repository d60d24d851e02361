use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = vessel_cli::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(vessel_cli::EXIT_INPUT as u8);
    }
    ExitCode::from(out.code as u8)
}
