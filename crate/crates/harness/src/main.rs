use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use sgdlab::constructions::{deterministic_suite, Family, LipschitzInstance, StronglyConvexInstance};
use sgdlab::rng::replica_stream;
use sgdlab_harness::{parse_config, resolve_out_dir, run_and_write, Experiment, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "lab", version, about = "Projected SGD experiments and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config and the environment).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Worker threads for replica fan-out.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the deterministic certificate suite on an adversarial instance.
    Verify {
        /// `sc` or `lip`.
        family: Family,
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// List the available experiments.
    List,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<20} {}", e.name(), e.description());
            }
            Ok(true)
        }
        Command::Verify { family, horizon, c } => verify(family, horizon, c),
        Command::Run {
            config,
            out,
            seed,
            trials,
            threads,
        } => {
            if let Some(n) = threads {
                set_threads(n)?;
            }
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = parse_config(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = trials {
                if n == 0 {
                    bail!("--trials must be positive");
                }
                cfg.trials = n;
            }
            let env = std::env::var(OUT_DIR_ENV).ok();
            let dir = resolve_out_dir(out.as_deref(), &cfg, env.as_deref());
            let outcome = run_and_write(&cfg, &dir)?;
            for check in &outcome.checks {
                println!("{} {}: {}", if check.pass { "PASS" } else { "FAIL" }, check.name, check.detail);
            }
            println!("wrote {}", dir.display());
            let failed: Vec<&str> = outcome.failed_checks().map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                eprintln!("failing checks: {}", failed.join(", "));
            }
            Ok(failed.is_empty())
        }
    }
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_: usize) -> anyhow::Result<()> {
    eprintln!("note: built without the `parallel` feature; --threads is ignored");
    Ok(())
}

fn verify(family: Family, horizon: usize, c: f64) -> anyhow::Result<bool> {
    let ks: Vec<usize> = [1, 4, 16, 64, 128]
        .into_iter()
        .filter(|&k| k <= horizon)
        .chain((horizon > 1).then_some(horizon / 2))
        .collect();
    let mut rng = replica_stream(0, 0);
    let (_, report) = match family {
        Family::StronglyConvex => deterministic_suite(&StronglyConvexInstance::new(horizon)?, &ks, 20, &mut rng)?,
        Family::Lipschitz => deterministic_suite(&LipschitzInstance::new(horizon, c)?, &ks, 20, &mut rng)?,
    };
    let mut checks: Vec<&str> = report.rows.iter().map(|r| r.check.as_str()).collect();
    checks.dedup();
    for name in checks {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.check == name).collect();
        let failed = rows.iter().filter(|r| !r.pass).count();
        println!(
            "{} {name}: {} of {} hold",
            if failed == 0 { "PASS" } else { "FAIL" },
            rows.len() - failed,
            rows.len()
        );
    }
    let failed: Vec<String> = report.failures().map(|r| format!("{}[{}]", r.check, r.index)).collect();
    if !failed.is_empty() {
        eprintln!("failing checks: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}
