use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use msurf_cli::scenario::{self, Experiment, Origin, Scenario};
use msurf_cli::{builtin, runner};

#[derive(Parser)]
#[command(name = "msurf", version, about = "Minimal graphs over domains in conformal surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a built-in scenario by name.
    Run {
        config: String,
        /// Output directory (default `out/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the grid spacing.
        #[arg(long)]
        h: Option<f64>,
    },
    /// List the built-in scenarios.
    List,
    /// Parse and validate a scenario without running it.
    Check { config: String },
}

fn resolve(config: &str) -> Result<(Scenario, Origin)> {
    let path = Path::new(config);
    if path.exists() {
        return Ok((scenario::load(path)?, Origin::File(path.to_path_buf())));
    }
    match builtin::find(config) {
        Some(b) => Ok((scenario::parse(b.source)?, Origin::Builtin)),
        None => bail!("no scenario file or built-in scenario named {config:?} (see `msurf list`)"),
    }
}

fn override_h(s: &mut Scenario, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        bail!("--h must be positive, got {h}");
    }
    s.solver.h = h;
    match &mut s.experiment {
        Experiment::IdentityCheck { h: step, .. } => *step = h,
        Experiment::SupersolutionCheck { h_list, .. } => *h_list = vec![h, h / 2.0],
        _ => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for b in builtin::BUILTINS {
                let desc = scenario::parse(b.source).map(|s| s.description).unwrap_or_default();
                println!("{:<28} {desc}", b.name);
            }
            Ok(true)
        }
        Command::Check { config } => resolve(&config).and_then(|(s, origin)| {
            s.geometry(&origin)?;
            println!("{}: ok ({})", s.name, s.experiment.kind());
            Ok(true)
        }),
        Command::Run { config, out, h } => (|| {
            let (mut s, origin) = resolve(&config)?;
            if let Some(h) = h {
                override_h(&mut s, h)?;
            }
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(&s.name));
            let summary = runner::run(&s, &origin, &out)?;
            for c in &summary.checks {
                let tag = match (c.pass, c.asserted) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL",
                    (false, false) => "note",
                };
                println!("{tag} {}: {} (limit {})", c.name, c.value, c.limit);
            }
            println!("{}: {} -> {}", s.name, if summary.pass { "pass" } else { "fail" }, summary.out_dir.join("report.json").display());
            Ok(summary.pass)
        })(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
