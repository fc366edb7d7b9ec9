use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stderr = std::io::stderr();
    if let Err(e) = schmidt_frontier_cli::init_threads() {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code as u8);
    }
    let code = schmidt_frontier_cli::run(std::env::args_os(), &mut std::io::stdout(), &mut stderr);
    ExitCode::from(code as u8)
}
