use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::Parser;
use typeseed_cli::service::{serve, ServiceConfig};
use typeseed_cli::{run, Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve {
            port,
            seed,
            max_examples,
        } => serve_blocking(port, seed, max_examples),
        command => run(command, &mut BufWriter::new(io::stdout().lock())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn serve_blocking(port: u16, seed: u64, max_examples: usize) -> anyhow::Result<()> {
    let config = ServiceConfig::new(port, seed, max_examples)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(serve(config))?;
    Ok(())
}
