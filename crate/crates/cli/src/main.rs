use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbattery_cli::config::{parse_config_with, ExperimentConfig, Mode, Overrides};
use qbattery_cli::{run, CliError, Result};

#[derive(Parser)]
#[command(name = "qbattery", version, about = "Spin-chain quantum battery experiments")]
struct Cli {
    /// Integrator time step for open-system runs
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Final time for open-system runs
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-system ξ_max sweep from a config file
    ClosedSweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Open-system trajectories and power-law fit from a config file
    OpenScaling {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Data for one figure preset (1..9)
    Figure {
        id: u32,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &PathBuf, overrides: &Overrides, expected: &[Mode]) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::validation("--config", format!("{}: {e}", path.display())))?;
    let cfg = parse_config_with(&text, overrides)?;
    if !expected.contains(&cfg.mode) {
        let names: Vec<&str> = expected.iter().map(|m| m.name()).collect();
        return Err(CliError::validation(
            "mode",
            format!("`{}` does not match this subcommand (expected {})", cfg.mode, names.join(" or ")),
        ));
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    let (common, cfg) = {
        let overrides = |common: &Common| Overrides {
            dt: cli.dt,
            t_max: cli.t_max,
            out_dir: common.out.clone(),
        };
        match &cli.command {
            Command::ClosedSweep { config, common } => (common, load(config, &overrides(common), &[Mode::ClosedSweep])?),
            Command::OpenScaling { config, common } => (
                common,
                load(config, &overrides(common), &[Mode::OpenScaling, Mode::OpenRun])?,
            ),
            Command::Figure { id, common } => {
                let text = format!("mode = figure\nfigure = {id}\n");
                (common, parse_config_with(&text, &overrides(common))?)
            }
        }
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.workers {
        if n == 0 {
            return Err(CliError::validation("--workers", "must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::validation("--workers", e.to_string()))?;

    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let report = pool.install(|| run(&cfg))?;
    for record in &report.manifest.runs {
        let label = if record.name.is_empty() { String::new() } else { format!("{}: ", record.name) };
        for (key, entry) in record.parameters.iter().filter(|(_, e)| e.assumed) {
            match &entry.note {
                Some(note) => eprintln!("{label}assumed {key} = {} ({note})", entry.value),
                None => eprintln!("{label}assumed {key} = {}", entry.value),
            }
        }
        if let Some(fit) = &record.fit {
            eprintln!(
                "{label}E(N) = A N^alpha: A = {:.4} ± {:.4}, alpha = {:.4} ± {:.4} ({})",
                fit.a, fit.sigma_a, fit.alpha, fit.sigma_alpha, fit.class
            );
        }
    }
    eprintln!(
        "wrote {} files in {:.1} s",
        report.written.len(),
        report.manifest.wall_clock_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
