use clap::Parser;
use freejacobi_cli::args::Cli;
use freejacobi_cli::commands::{emit, out_of, run};
use freejacobi_cli::{CliResult, Failure};
use std::process::ExitCode;

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("FREEJACOBI_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("FREEJACOBI_THREADS={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn main_inner(cli: &Cli) -> CliResult<()> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(Failure::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let out = run(&cli.command)?;
    let text = emit(&out, out_of(&cli.command).out.as_deref())?;
    print!("{text}");
    if out.ok {
        Ok(())
    } else {
        Err(Failure::Unverified)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
