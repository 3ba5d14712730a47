use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use precip_merge::cli::{cmd_explore, cmd_report, cmd_run, cmd_synth, CliError, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(version, about = "Merge satellite precipitation products with gauge observations")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed (folds, and the generator for `synth`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic gauge and two-product benchmark.
    Synth,
    /// Cross-validate every algorithm and predictor set and write the report.
    Run,
    /// Spearman correlations and full-data gain importance.
    Explore,
    /// Render tables and heatmaps from a report.
    Report {
        /// Long-format report (default: <out>/report.csv).
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn execute(args: Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    let list = |paths: Vec<PathBuf>| {
        for p in paths {
            println!("wrote {}", p.display());
        }
    };
    match args.command {
        Command::Synth => {
            let mut spec = cfg.synth_or_default();
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            list(cmd_synth(&spec, &cfg.output.dir)?);
        }
        Command::Run => {
            let (report, paths) = cmd_run(&cfg, args.format.unwrap_or_default())?;
            println!("{} samples from {} stations", report.n_samples, report.n_stations);
            list(paths);
        }
        Command::Explore => {
            let (_, paths) = cmd_explore(&cfg, args.format.unwrap_or_default())?;
            list(paths);
        }
        Command::Report { input } => {
            let input = input.unwrap_or_else(|| cfg.output.dir.join("report.csv"));
            list(cmd_report(
                &input,
                &cfg.output.dir,
                args.format.unwrap_or(OutputFormat::Svg),
            )?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
