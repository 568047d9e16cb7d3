use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ncosc::harness::{self, ExperimentConfig, FigureId};
use ncosc::{Error, Result};

#[derive(Parser)]
#[command(name = "ncosc", version, about = "Noncommutative time-dependent oscillator: EP solutions and uncertainty relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write CSVs plus a manifest
    Run {
        config: PathBuf,
        /// output directory; defaults to the config's `output`, then `out/run`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data series of one figure panel (fig1a..fig6b, or `all`)
    Figure {
        id: String,
        #[arg(long, default_value = "out/figures")]
        out: PathBuf,
    },
    /// Rerun a config across values of one parameter
    Sweep {
        config: PathBuf,
        /// dotted path into the config, e.g. `analysis.0.s`
        #[arg(long)]
        param: String,
        /// comma-separated list or inclusive integer range `lo..hi`
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the EP layer only
    EpSolve {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite
    Check,
}

fn out_dir(cli_out: Option<PathBuf>, cfg: &ExperimentConfig, fallback: &str) -> PathBuf {
    cli_out.or_else(|| cfg.output.clone()).unwrap_or_else(|| Path::new("out").join(fallback))
}

fn report_run(report: &harness::RunReport) -> Result<()> {
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} ({})", c.name, c.detail);
    }
    println!("wrote {} files to {}", report.files.len(), report.out_dir.display());
    if report.passed() {
        Ok(())
    } else {
        Err(Error::Check(format!("{} embedded checks failed", report.checks.iter().filter(|c| !c.passed).count())))
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            report_run(&harness::run(&cfg, &out_dir(out, &cfg, "run"))?)
        }
        Command::EpSolve { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            report_run(&harness::ep_solve(&cfg, &out_dir(out, &cfg, "ep"))?)
        }
        Command::Figure { id, out } => {
            let ids = if id == "all" { FigureId::ALL.to_vec() } else { vec![id.parse()?] };
            for id in ids {
                let files = harness::write_figure(id, &out)?;
                println!("{id}: wrote {} files to {}", files.len(), out.join(id.as_str()).display());
            }
            Ok(())
        }
        Command::Sweep { config, param, values, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let values = harness::parse_values(&values)?;
            let (file, failed) = harness::sweep(&cfg, &param, &values, &out_dir(out, &cfg, "sweep"))?;
            println!("wrote {}", file.display());
            if failed > 0 {
                return Err(Error::Check(format!("{failed} of {} sweep runs failed (recorded in the CSV)", values.len())));
            }
            Ok(())
        }
        Command::Check => {
            let lines = harness::check_suite();
            for l in &lines {
                println!("{l}");
            }
            let failed = lines.iter().filter(|l| !l.passed).count();
            if failed > 0 {
                return Err(Error::Check(format!("{failed} of {} invariants failed", lines.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
