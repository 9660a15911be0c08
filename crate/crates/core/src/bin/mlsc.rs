use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mlsc::allocation::RoundingScheme;
use mlsc::experiment::{preset, write_csv, Experiment, ExperimentConfig, Method, ReferenceConfig, CSV_COLUMNS};
use mlsc::{Error, Result};

#[derive(Parser)]
#[command(name = "mlsc", version, about = "Multilevel stochastic collocation experiments")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the configured estimator for each target and print CSV rows.
    Run(Common),
    /// Print formula, up and up/down allocation rows per target (no solves).
    Plan(Common),
    /// Cost-versus-error sweep over all targets for each sweep method.
    Sweep(Common),
    /// Compute (or load from cache) the overkill reference value.
    Reference(Common),
    /// Estimate rate constants from the pilot levels.
    EstimateConstants(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in setup: paper-1d-n20 or paper-2d-n10.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    method: Option<Method>,
    /// Relative accuracy target; repeat for several.
    #[arg(long = "eps")]
    eps: Vec<f64>,
    #[arg(long)]
    scheme: Option<RoundingScheme>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file (CSV for run/sweep, JSON otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fixed grid level for single-level collocation.
    #[arg(long)]
    grid_level: Option<usize>,
    /// Fixed mesh level for single-level methods.
    #[arg(long)]
    level: Option<usize>,
    /// Override the reference mesh width.
    #[arg(long)]
    h_star: Option<f64>,
    /// Override the reference grid level.
    #[arg(long)]
    l_star: Option<usize>,
    /// Directory for cached reference values.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Ignore any configured reference.
    #[arg(long)]
    no_reference: bool,
    /// Estimate constants from the pilot instead of using configured ones.
    #[arg(long)]
    pilot: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => return Err(Error::Config {
                key: "config".into(),
                message: "pass --config FILE or --preset NAME".into(),
            }),
        };
        if let Some(m) = self.method {
            cfg.method = m;
        }
        if !self.eps.is_empty() {
            cfg.eps = self.eps.clone();
        }
        if let Some(s) = self.scheme {
            cfg.scheme = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.grid_level.is_some() {
            cfg.grid_level = self.grid_level;
            if self.eps.is_empty() {
                cfg.eps.clear();
            }
        }
        if self.level.is_some() {
            cfg.level = self.level;
        }
        if self.pilot {
            cfg.constants = None;
        }
        if self.no_reference {
            cfg.reference = None;
        } else if self.h_star.is_some() || self.l_star.is_some() || self.cache_dir.is_some() {
            let base = cfg.reference.clone().unwrap_or(ReferenceConfig {
                h_star: cfg.problem.h0,
                l_star: 3,
                cache_dir: None,
            });
            cfg.reference = Some(ReferenceConfig {
                h_star: self.h_star.unwrap_or(base.h_star),
                l_star: self.l_star.unwrap_or(base.l_star),
                cache_dir: self.cache_dir.clone().or(base.cache_dir),
            });
        }
        if let Some(out) = &self.out {
            cfg.output.csv = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_json(path: Option<&PathBuf>, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn print_rows(rows: &[mlsc::experiment::RunRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn execute(verb: Verb) -> Result<()> {
    let common = match &verb {
        Verb::Run(c) | Verb::Plan(c) | Verb::Sweep(c) | Verb::Reference(c) | Verb::EstimateConstants(c) => c,
    };
    if let Some(n) = common.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config {
                key: "workers".into(),
                message: e.to_string(),
            })?;
    }
    let cfg = common.config()?;
    let out = cfg.output.csv.clone();
    let exp = Experiment::new(cfg)?;

    match verb {
        Verb::Run(_) => {
            let results = exp.run()?;
            let rows: Vec<_> = results.iter().map(|(r, _)| r.clone()).collect();
            print_rows(&rows)?;
            if let Some(path) = out {
                write_csv(&path, &rows)?;
                let reports: Vec<_> = results.iter().map(|(_, r)| r).collect();
                let mut json = path.into_os_string();
                json.push(".reports.json");
                write_json(Some(&PathBuf::from(json)), &reports)?;
            }
        }
        Verb::Sweep(_) => {
            let (rows, fits) = exp.sweep()?;
            print_rows(&rows)?;
            for f in &fits {
                eprintln!("{}: cost slope {:.3} over {} targets", f.method, f.slope, f.points);
            }
            if let Some(path) = out {
                write_csv(&path, &rows)?;
            }
        }
        Verb::Plan(_) => {
            let rc = exp.constants()?;
            if let Some(w) = rc.hypothesis_warning() {
                log::warn!("{w}");
            }
            let mut docs = Vec::new();
            for &eps in &exp.config.eps {
                let rows = exp.plan_rows(eps, &rc)?;
                for line in rows.lines() {
                    println!("{line}");
                }
                docs.push(rows);
            }
            if out.is_some() {
                write_json(out.as_ref(), &docs)?;
            }
        }
        Verb::Reference(_) => {
            let value = exp
                .reference()?
                .ok_or_else(|| Error::Config {
                    key: "reference".into(),
                    message: "no reference configured".into(),
                })?;
            let doc = serde_json::json!({ "value": value, "bits": format!("{:016x}", value.to_bits()) });
            write_json(out.as_ref(), &doc)?;
        }
        Verb::EstimateConstants(_) => {
            let report = exp.pilot()?;
            write_json(out.as_ref(), &report)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.verb) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
