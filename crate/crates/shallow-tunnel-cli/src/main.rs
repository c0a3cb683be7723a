use clap::{Args, Parser, Subcommand};
use shallow_tunnel_cli::verify::verify_report;
use shallow_tunnel_cli::{emit_plot_script, parse_config, run_case, run_sweep, CliError, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "shallow-tunnel", version, about = "Stress and displacement around a shallow circular tunnel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding `out_dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Skip Lanczos filtering.
    #[arg(long)]
    no_filter: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one case and write its CSVs and manifest.
    Run(Common),
    /// Solve every combination of the sweep lists.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Number of cases solved concurrently.
        #[arg(long, value_name = "K")]
        workers: Option<usize>,
    },
    /// Print boundary residuals, identity checks and the x0/h study.
    Verify(Common),
    /// Write a gnuplot script for the artifacts in a directory.
    Plot {
        /// Artifact directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => parse_config(&std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if common.no_filter {
        cfg.lanczos = false;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(common) => {
            let cfg = load(&common)?;
            let o = run_case(&cfg)?;
            println!("{}: {} reps, solved in {:.3} s, total {:.3} s", o.dir.display(), o.solution.reps, o.solve_seconds, o.total_seconds);
        }
        Command::Sweep { common, workers } => {
            let cfg = load(&common)?;
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let o = run_sweep(&cfg, workers)?;
            println!("{} cases, summary in {}", o.cases.len(), o.summary.display());
            let failed = o.failures();
            if failed > 0 {
                return Err(CliError::SweepFailures { failed, total: o.cases.len() });
            }
        }
        Command::Verify(common) => {
            let cfg = load(&common)?;
            let text = verify_report(&cfg)?;
            print!("{text}");
            if common.out.is_some() {
                std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
                let p = cfg.out_dir.join("verify.txt");
                std::fs::write(&p, text).map_err(|e| CliError::io(&p, e))?;
            }
        }
        Command::Plot { out } => {
            let p = emit_plot_script(&out)?;
            println!("{}", p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
