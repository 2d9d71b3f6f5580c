use std::process::ExitCode;

fn main() -> ExitCode {
    let result = vvp_cli::parse_config(std::env::args_os()).and_then(|cfg| vvp_cli::run(&cfg, &mut std::io::stdout()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(vvp_cli::CliError::Args(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
