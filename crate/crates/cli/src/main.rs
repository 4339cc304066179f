use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use koszulkit::{render, run, validate_source, Format, RunConfig, RunError};
use koszulkit_core::presentation::Task;
use koszulkit_core::FieldSpec;

#[derive(Parser)]
#[command(name = "koszulkit", version, about = "Koszul certificates, Ext algebras and duality checks for quiver algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks listed in the input file (or given with --tasks).
    Run {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// `Q` or `Fp:<p>`; overrides the field of the input file.
        #[arg(long, value_parser = parse_field)]
        field: Option<FieldSpec>,
        /// Comma-separated task list; overrides `[tasks] run`.
        #[arg(long, value_delimiter = ',', value_parser = parse_task)]
        tasks: Option<Vec<Task>>,
        /// Record wall-clock time per task.
        #[arg(long)]
        timings: bool,
    },
    /// Parse the input and build the algebra without running tasks.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_field)]
        field: Option<FieldSpec>,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_field(s: &str) -> Result<FieldSpec, String> {
    FieldSpec::parse(s).map_err(|e| e.to_string())
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse().map_err(|e: koszulkit_core::Error| e.to_string())
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            input,
            format,
            out,
            threads,
            field,
            tasks,
            timings,
        } => {
            let config = RunConfig {
                input,
                tasks,
                format,
                out,
                threads,
                field,
                timings,
            };
            let report = match run(&config) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let doc = render(&report, config.format);
            match &config.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, doc) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(3);
                    }
                }
                None => print!("{doc}"),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Validate { input, field } => {
            let text = match std::fs::read_to_string(&input) {
                Ok(t) => t,
                Err(source) => return fail(&RunError::Io { path: input, source }),
            };
            match validate_source(&text, field) {
                Ok(s) => {
                    println!(
                        "ok: {} vertices, {} arrows, {} relations; dims {:?}{}",
                        s.vertices.len(),
                        s.arrows,
                        s.relations,
                        s.dims,
                        if s.finite_top.is_some() { "" } else { " (truncated)" }
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
