use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use htk::commands::{self, exit, CliError, Outcome, Overrides};
use htk::spec::ProblemSpec;

#[derive(Parser)]
#[command(
    name = "htk",
    version,
    about = "Hypertoric and elliptic hypertoric toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact sequences, circuits, smoothness and fixed points.
    Analyze(Common),
    /// Multiplication tables of the three ring flavors.
    Rings(Common),
    /// Compare the circuit, coinvariant and specialized ideals.
    Hikita(Common),
    /// Numeric identity checks.
    Verify(Common),
    /// SVG figures of the arrangement; `--out` is the file prefix.
    Plot(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    radius: Option<u32>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
}

fn init_threads() {
    let Ok(v) = std::env::var("HTK_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => eprintln!("htk: ignoring HTK_THREADS={v:?}"),
    }
}

fn run(cli: Cli) -> Result<(Outcome, Common, bool), CliError> {
    let (name, c) = match cli.command {
        Command::Analyze(c) => ("analyze", c),
        Command::Rings(c) => ("rings", c),
        Command::Hikita(c) => ("hikita", c),
        Command::Verify(c) => ("verify", c),
        Command::Plot(c) => ("plot", c),
    };
    let mut spec = ProblemSpec::from_path(&c.spec)?;
    Overrides {
        seed: c.seed,
        radius: c.radius,
        degree: c.degree,
        samples: c.samples,
    }
    .apply(&mut spec);
    let outcome = match name {
        "analyze" => commands::analyze(&spec)?,
        "rings" => commands::rings(&spec)?,
        "hikita" => commands::hikita(&spec)?,
        "verify" => commands::verify(&spec)?,
        _ => {
            let prefix = c.out.clone().unwrap_or_else(|| PathBuf::from(&spec.name));
            let o = commands::plot(&spec, &prefix)?;
            return Ok((o, c, true));
        }
    };
    Ok((outcome, c, false))
}

fn main() -> ExitCode {
    init_threads();
    let (outcome, c, is_plot) = match run(Cli::parse()) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("htk: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = if c.json {
        outcome.report.to_json()
    } else {
        outcome.report.to_text()
    };
    // For plot, `--out` names the figures, so the report goes to stdout.
    let written = match (&c.out, is_plot) {
        (Some(path), false) => {
            std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        _ => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("htk: {e}");
        return ExitCode::from(exit::FAILURE as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
