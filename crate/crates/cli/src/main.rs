//! `qumin`: run programs, check quantum libraries, or start a REPL.

mod repl;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qumin::interp::{Interpreter, RuntimeError};

#[derive(Parser)]
#[command(name = "qumin", version, about = "Interpreter for the Qumin quantum programming language")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Type check quantum libraries, load classical ones, then evaluate the program.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Type check the file's quantum libraries (or the file itself, if it
    /// consists of typed routines) without running anything.
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Interactive session.
    Repl {
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Args)]
struct Options {
    /// Seed for measurement outcomes; the same seed gives the same output.
    #[arg(long)]
    seed: Option<u64>,
    /// Extra directory to search for libraries (repeatable).
    #[arg(long = "path", value_name = "DIR")]
    path: Vec<PathBuf>,
}

fn interpreter(opts: &Options) -> Interpreter {
    let mut builder = Interpreter::builder().maybe_seed(opts.seed);
    for dir in &opts.path {
        builder = builder.search_dir(dir);
    }
    builder.build()
}

fn fail(it: &Interpreter, err: &RuntimeError) -> ExitCode {
    eprintln!("{}", it.render_error(err));
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.verb {
        Verb::Run { file, opts } => {
            let mut it = interpreter(&opts);
            match it.run_file(&file) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => fail(&it, &e),
            }
        }
        Verb::Check { file, opts } => {
            let mut it = interpreter(&opts);
            match it.check_file(&file) {
                Ok(table) => {
                    for sig in table.values() {
                        println!("{}: {}", sig.name, sig.as_type());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&it, &e),
            }
        }
        Verb::Repl { opts } => {
            let mut it = interpreter(&opts);
            let stdin = io::stdin();
            let interactive = std::io::IsTerminal::is_terminal(&stdin);
            match repl::run(&mut it, stdin.lock(), io::stdout(), interactive) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(5)
                }
            }
        }
    }
}

