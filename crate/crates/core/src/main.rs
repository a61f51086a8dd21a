use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hilfer::cli::{exit_code_for, parse_config_as, run, Command, RunConfig, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "hilfer", version, about = "Fundamental solutions and Cauchy problems with Hilfer time derivatives")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the fundamental solution over the grid.
    EvalKernel {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve the Cauchy problem on the grid.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a self-similar solution on the grid.
    Selfsim {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the identity suite and write a JSON report.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(path: Option<&PathBuf>, command: Command) -> Result<RunConfig, String> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => String::new(),
    };
    parse_config_as(&text, command).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (path, command) = match &args.cmd {
        Cmd::EvalKernel { config } => (Some(config), Command::EvalKernel),
        Cmd::Solve { config } => (Some(config), Command::Solve),
        Cmd::Selfsim { config } => (Some(config), Command::Selfsim),
        Cmd::Verify { config } => (config.as_ref(), Command::Verify),
    };
    let config = match load(path, command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run(&config) {
        Ok(o) => {
            println!("{}", o.message);
            for a in &o.artifacts {
                println!("wrote {}", a.display());
            }
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
