use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bvhomeo_cli::config::{Mode, ReportFormat, RunConfig};
use bvhomeo_cli::report::Report;
use bvhomeo_cli::verify::{self, Params, Target};
use bvhomeo_cli::{construct, mesh};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bvhomeo", version, about = "Cantor-type BV homeomorphisms: construction, checks and meshes")]
struct Cli {
    /// Config file, either JSON or `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<ReportFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the cells and sequences of one level.
    Construct {
        #[arg(long)]
        level: Option<usize>,
    },
    /// Run a verification suite; exits non-zero if any check fails.
    Verify {
        #[arg(value_enum)]
        target: Target,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Export the image of an n × n grid under f_k.
    ExportMesh {
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = cli.mode {
        cfg.mode = m;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    if let Some(f) = cli.format {
        cfg.report_format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn checked_level(cfg: &RunConfig, level: Option<usize>) -> Result<usize> {
    let k = level.unwrap_or(cfg.max_level);
    if !(1..=12).contains(&k) {
        anyhow::bail!("level must lie in [1, 12], got {k}");
    }
    Ok(k)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Construct { level } => {
            for p in construct::run(&cfg, checked_level(&cfg, level)?)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
        Command::Verify { target, level, tol } => {
            let level = checked_level(&cfg, level)?;
            if let Some(t) = tol {
                if !(t > 0.0 && t.is_finite()) {
                    anyhow::bail!("tol must be positive, got {t}");
                }
            }
            let params = Params::from_config(&cfg, Some(level), tol);
            let report = Report::new(target.name(), &cfg, verify::run(target, &params)?);
            print!("{}", report.summary());
            let path = report.write(&cfg.output_dir, cfg.report_format)?;
            println!("wrote {}", path.display());
            Ok(report.pass)
        }
        Command::ExportMesh { level, n } => {
            for p in mesh::run(&cfg, checked_level(&cfg, level)?, n)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
