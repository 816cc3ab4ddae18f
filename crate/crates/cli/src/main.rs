use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use widom_cli::{exit, export, pipeline, verify, CliError};

#[derive(Debug, Parser)]
#[command(name = "widom", version, about = "Potential theory and Jacobi recurrences on finite-gap sets")]
struct Cli {
    /// Output directory (default: the config's `out`, else ./widom-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent diagnostics.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed of the sampled property sweep in `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the pipeline on a JSON config.
    Run { config: PathBuf },
    /// Run an acceptance suite: quick or full.
    Verify { suite: String },
    /// Convert a finished run: format csv|gnuplot, what coefficients|widom|density|almost-period.
    Export { format: String, what: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::usage(e.to_string().trim_end())),
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.code as u8)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    match cli.command {
        Command::Run { config } => {
            let cfg = pipeline::load_config(&config)?;
            let out = pipeline::output_dir(&cfg, cli.out.as_deref());
            let report = pipeline::run(&cfg, &out)?;
            println!("wrote {} ({} levels, capacity {})", out.display(), report.coefficients.n, report.equilibrium.capacity);
            for note in &report.notes {
                println!("note: {note}");
            }
            Ok(exit::OK)
        }
        Command::Verify { suite } => {
            let suite = verify::Suite::parse(&suite)?;
            let out = cli.out.unwrap_or_else(|| PathBuf::from("widom-out"));
            let report = verify::verify(suite, &out)?;
            print!("{}", report.table());
            let (ok, cases) = verify::property_sweep(cli.seed, 16);
            println!("sampled property sweep (seed {}): {ok}/{cases} cases hold", cli.seed);
            Ok(if report.succeeded() { exit::OK } else { exit::CRITERIA_FAILED })
        }
        Command::Export { format, what } => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("widom-out"));
            let path = export::export(&out, &format, &what)?;
            println!("wrote {}", path.display());
            Ok(exit::OK)
        }
    }
}
