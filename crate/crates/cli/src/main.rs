use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vmdca::data::{Instance, InstanceContainer};
use vmdca_cli::config::{Dataset, RunConfig};
use vmdca_cli::{audit_trace, run_matrix, run_reference, write_outputs, CliError, Result};

/// Benchmark harness for accelerated proximal DC solvers.
#[derive(Parser)]
#[command(name = "vmdca", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured dataset and save it as an instance file.
    Gen(Common),
    /// Compute the reference objective for each seed.
    Ref(Common),
    /// Run the solver × seed matrix and write traces and summaries.
    Bench(Common),
    /// Audit a finished trace CSV. Exits with 1 if any invariant fails.
    Check { trace: PathBuf },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Seeds to run (repeatable); replaces the configured list.
    #[arg(long)]
    seed: Vec<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iteration cap per run.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relative-error tolerance (repeatable, loosest first).
    #[arg(long)]
    tol: Vec<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if !self.seed.is_empty() {
            cfg.seeds = self.seed.clone();
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        if !self.tol.is_empty() {
            cfg.tolerances = self.tol.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn gen(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let payload = match cfg.load_data()? {
        Dataset::Logistic(data) => Instance::Logistic {
            data: (*data).clone(),
            truth: None,
        },
        Dataset::PoissonCs { data, truth, .. } => Instance::PoissonCs {
            data: (*data).clone(),
            truth: Some((*truth).clone()),
        },
        Dataset::Lasso(_) => {
            return Err(CliError::Config("lasso problems are given inline".into()))
        }
    };
    let params = serde_json::to_value(&cfg.problem).map_err(|e| CliError::Config(e.to_string()))?;
    let container = InstanceContainer::new(payload, None, params);
    std::fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join("instance.json");
    container
        .save(&path)
        .map_err(|e| CliError::Output(e.to_string()))?;
    println!("{}", path.display());
    Ok(())
}

fn reference(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let data = cfg.load_data()?;
    let mut refs = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let v = run_reference(&cfg, &data, seed)?;
        println!("seed {seed}: F* = {v:.16e}");
        refs.push((seed, v));
    }
    vmdca_cli::output::write_references(&cfg.output_dir, &refs)
}

fn bench(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let out = run_matrix(&cfg)?;
    write_outputs(&cfg.output_dir, &out)?;
    println!(
        "{:<10} {:>8} {:>12} {:>10} {:>6}",
        "solver", "tol", "iterations", "seconds", "hits"
    );
    for row in &out.summary {
        let iters = match (row.max_flag, row.mean_iterations) {
            (true, None) => "Max".to_string(),
            (flag, Some(m)) => format!("{m:.1}{}", if flag { "*" } else { "" }),
            (false, None) => "-".to_string(),
        };
        let secs = row
            .mean_seconds
            .map_or("-".to_string(), |s| format!("{s:.3}"));
        println!(
            "{:<10} {:>8.0e} {:>12} {:>10} {:>5.0}%",
            row.solver,
            row.tolerance,
            iters,
            secs,
            100.0 * row.hit_rate
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(c) => gen(c),
        Command::Ref(c) => reference(c),
        Command::Bench(c) => bench(c),
        Command::Check { trace } => match audit_trace(trace) {
            Ok(audit) => {
                println!(
                    "{} rows, {} restarts, {} backtracks",
                    audit.rows, audit.restarts, audit.total_backtracks
                );
                for v in &audit.violations {
                    println!("violation: {v}");
                }
                if audit.ok() {
                    Ok(())
                } else {
                    return ExitCode::from(1);
                }
            }
            Err(CliError::Output(e)) => Err(CliError::Config(e)),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
