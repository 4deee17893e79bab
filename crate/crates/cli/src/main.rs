use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use trolab_cli::checks::Theorem;
use trolab_cli::commands::{self, Overrides};
use trolab_cli::report::{render_body, render_corpus};

/// Derivation spaces of finite-dimensional *-algebras and TROs.
#[derive(Parser)]
#[command(name = "trolab", version)]
struct Cli {
    /// Numerical tolerance (overrides the file's options.tol).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Unitize linking algebras.
    #[arg(long, global = true)]
    unitize: Option<bool>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Skip the text table.
    #[arg(long, global = true)]
    json_only: bool,
    /// Fallback tolerance when neither --tol nor options.tol is given.
    #[arg(long = "env-tol", env = "TROLAB_TOL", hide = true)]
    env_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every applicable derivation space of a problem file.
    Derivations { file: PathBuf },
    /// Certify one theorem on a problem file.
    Check {
        #[arg(long, value_enum)]
        theorem: Theorem,
        file: PathBuf,
    },
    /// Run derivations and all applicable checks on every *.json in a directory.
    Corpus { dir: PathBuf },
}

fn emit<T: Serialize>(cli: &Cli, report: &T, table: String) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    match &cli.out {
        Some(p) => fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    if !cli.json_only {
        print!("{table}");
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let ov = Overrides {
        tol: cli.tol,
        env_tol: cli.env_tol,
        unitize: cli.unitize,
    };
    if let Some(t) = cli.tol {
        anyhow::ensure!(t.is_finite() && t > 0.0, "--tol must be positive, got {t}");
    }
    match &cli.command {
        Command::Derivations { file } => {
            let problem = commands::load(file, ov)?;
            let r = commands::derivations(&problem, &name(file))?;
            emit(cli, &r, render_body(&r.comparable))?;
            Ok(r.passed())
        }
        Command::Check { theorem, file } => {
            let problem = commands::load(file, ov)?;
            let r = commands::check(&problem, &name(file), *theorem)?;
            emit(cli, &r, render_body(&r.comparable))?;
            Ok(r.passed())
        }
        Command::Corpus { dir } => {
            let r = commands::corpus(dir, ov)?;
            emit(cli, &r, render_corpus(&r.comparable))?;
            Ok(r.passed())
        }
    }
}

fn name(p: &std::path::Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
