use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = depmark::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(&outcome.stdout).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(depmark::exit::USAGE);
    }
    let mut stderr = std::io::stderr().lock();
    for line in &outcome.notes {
        let _ = writeln!(stderr, "{line}");
    }
    ExitCode::from(outcome.code)
}
