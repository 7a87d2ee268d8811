use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zonostrat::input::{read_instance, LoadedInstance};
use zonostrat::Output;

/// Half-open zonotopes and oriented toric hyperplane stratifications.
///
/// Exit codes: 0 when every check passes, 1 on usage or input errors, 2 when
/// a verification or oracle comparison fails.
#[derive(Parser, Debug)]
#[command(name = "zonostrat", version)]
struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Source {
    /// Instance file (JSON, or one vector per line with --plain).
    file: PathBuf,

    /// Read one vector per line instead of JSON.
    #[arg(long)]
    plain: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate strata and points, run every verifier and write a JSON report.
    Analyze {
        #[command(flatten)]
        source: Source,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Express points in the coordinates of the file's paper_pi.
        #[arg(long)]
        paper_pi: bool,
    },
    /// Draw the arrangement and the zonotope as SVG files.
    Render {
        #[command(flatten)]
        source: Source,
        /// Output directory.
        #[arg(long)]
        dir: PathBuf,
    },
    /// Compare enumerations with independent oracles.
    Oracle {
        #[command(flatten)]
        source: Source,
        /// Also scan the fundamental domain for strata (full rank only).
        #[arg(long)]
        strata_oracle: bool,
    },
    /// List the class-group elements with image in −Z.
    Theta {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        paper_pi: bool,
    },
    /// Restrict the instance to the span of one stratum.
    Restrict {
        #[command(flatten)]
        source: Source,
        /// 1-based index into the stratum table of the report.
        #[arg(long)]
        stratum: usize,
        #[arg(long)]
        paper_pi: bool,
    },
}

fn load(source: &Source) -> anyhow::Result<LoadedInstance> {
    Ok(read_instance(&source.file, source.plain)?)
}

fn emit(output: Output, out: Option<&PathBuf>) -> anyhow::Result<bool> {
    match out {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?,
        None => print!("{}", output.text),
    }
    Ok(output.passed)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global()?;
    }
    match cli.command {
        Command::Analyze { source, out, paper_pi } => {
            let input = load(&source)?;
            if paper_pi && input.printed.is_none() {
                anyhow::bail!("--paper-pi given but {} has no paper_pi", source.file.display());
            }
            emit(zonostrat::analyze(&input, paper_pi), out.as_ref())
        }
        Command::Render { source, dir } => {
            let input = load(&source)?;
            let (written, skipped) = zonostrat::render(&input, &dir)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            for notice in skipped {
                eprintln!("{notice}");
            }
            Ok(true)
        }
        Command::Oracle { source, strata_oracle } => emit(zonostrat::oracle(&load(&source)?, strata_oracle)?, None),
        Command::Theta { source, paper_pi } => emit(zonostrat::theta(&load(&source)?, paper_pi), None),
        Command::Restrict {
            source,
            stratum,
            paper_pi,
        } => emit(zonostrat::restrict(&load(&source)?, stratum, paper_pi)?, None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
