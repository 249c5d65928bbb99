use clap::Parser;
use minsurf_cli::args::Cli;
use minsurf_cli::{commands, run, RunConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MINSURF_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = RunConfig::try_from(cli).and_then(|cfg| {
        let report = run(&cfg)?;
        commands::emit(&cfg, &report, &mut std::io::stdout().lock())?;
        Ok(report)
    });
    match result {
        Ok(r) if r.pass => ExitCode::SUCCESS,
        Ok(r) => {
            for c in r.checks.iter().filter(|c| !c.pass) {
                eprintln!("check {} failed: {:e} > {:e}", c.name, c.value, c.threshold);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
