//! Experiment runner CLI.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rdgd::bounds::BoundTracker;
use rdgd::config::{parse_config, ExperimentConfig};
use rdgd::engine::{transition_time, transition_time_brute_force, Algorithm};
use rdgd::error::{Error, Result};
use rdgd::experiment::{prepare, run_experiment};
use rdgd::io::{csv, json};
use rdgd::schedule::{ScheduleKind, StepsizeSchedule};

#[derive(Parser)]
#[command(name = "rdgd", about = "Corruption-tolerant distributed gradient descent simulator", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a config file and write CSV/JSON
    /// outputs.
    Run {
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (created if missing). Default: `out`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the config's trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the config's parallel job count.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate the theoretical bound per round without simulating.
    Bounds {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print the analytic transition time and its brute-force cross-check.
    T0 {
        /// Smoothness constant M.
        #[arg(long = "M")]
        m_smooth: f64,
        /// Strong-convexity constant alpha.
        #[arg(long)]
        alpha: f64,
        /// Feasible-set radius bound R_Theta.
        #[arg(long = "R")]
        r_theta: f64,
        /// Corruption growth exponent, 0 < r < 1/2.
        #[arg(long)]
        r: f64,
    },
    /// Parse a config, resolve defaults, and echo the result.
    Validate { config: PathBuf },
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
    let mut config = parse_config(&text)?;
    if let Some(base) = path.parent() {
        config.resolve_paths(base);
    }
    Ok(config)
}

fn apply_overrides(
    config: &mut ExperimentConfig,
    seed: Option<u64>,
    trials: Option<usize>,
    jobs: Option<usize>,
) {
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(trials) = trials {
        config.trials = trials.max(1);
    }
    if let Some(jobs) = jobs {
        config.jobs = jobs.max(1);
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

fn cmd_run(
    config_path: &Path,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    trials: Option<usize>,
    jobs: Option<usize>,
) -> Result<()> {
    let mut config = load_config(config_path)?;
    apply_overrides(&mut config, seed, trials, jobs);
    let out_dir = out_dir.unwrap_or_else(|| PathBuf::from("out"));
    ensure_dir(&out_dir)?;

    let result = run_experiment(config)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    csv::emit_trials_csv(&result, &out_dir.join("trials.csv"))?;
    csv::emit_aggregate_csv(&result, &out_dir.join("aggregate.csv"))?;
    json::emit_json(&result, &out_dir.join("result.json"))?;

    let last = result.aggregate.last().expect("horizon >= 1");
    print!("{} rounds, {} trial(s)", result.aggregate.len(), result.trials.len());
    if let Some(g) = last.gap_mean {
        print!(", final gap mean {g:.6e}");
    }
    if let Some(a) = last.accuracy_mean {
        print!(", final accuracy mean {a:.4}");
    }
    println!();
    println!("wrote {}", out_dir.join("trials.csv").display());
    println!("wrote {}", out_dir.join("aggregate.csv").display());
    println!("wrote {}", out_dir.join("result.json").display());
    Ok(())
}

fn cmd_bounds(config_path: &Path, seed: Option<u64>, out_dir: Option<PathBuf>) -> Result<()> {
    let mut config = load_config(config_path)?;
    apply_overrides(&mut config, seed, None, None);
    if config.algorithm == Algorithm::Dgd {
        return Err(Error::ConfigGeneral("no theoretical bound is defined for dgd".into()));
    }
    config.bounds = true;
    let out_dir = out_dir.unwrap_or_else(|| PathBuf::from("out"));
    ensure_dir(&out_dir)?;

    let setup = prepare(config)?;
    for w in &setup.warnings {
        eprintln!("warning: {w}");
    }
    let (case, params) = setup.bound_setup.expect("bounds forced on");
    let mut tracker = BoundTracker::new(case, params);
    let mut schedule = StepsizeSchedule::new(setup.schedule_kind)?;
    let mut out = String::from("t,bound\n");
    for t in 1..=setup.config.horizon {
        if let Some(plan) = setup.restart {
            if t == plan.t0 + 1 {
                if plan.full_reset {
                    schedule = StepsizeSchedule::new(ScheduleKind::RatioHarmonic)?;
                } else {
                    schedule.switch_kind(ScheduleKind::RatioHarmonic);
                }
            }
        }
        let (eta, _) = schedule.next();
        let bound = tracker.on_round(t, eta)?;
        out.push_str(&format!("{t},{}\n", csv::fmt_f64(bound)));
    }
    let path = out_dir.join("bounds.csv");
    std::fs::write(&path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    if let Some(t0) = setup.constants.t0 {
        println!("t0 = {t0}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_t0(m_smooth: f64, alpha: f64, r_theta: f64, r: f64) -> Result<()> {
    let tt = transition_time(m_smooth, alpha, r_theta, r)?;
    let brute = transition_time_brute_force(m_smooth, alpha, r_theta, r, 1_000_000);
    println!(
        "t0 = {} ({}), brute-force argmin over [2, 1e6] = {brute}",
        tt.t0,
        if tt.lambert { "Lambert W_-1" } else { "brute-force fallback" },
    );
    println!("B(r) = {:.17e}", tt.b_value);
    Ok(())
}

fn cmd_validate(config_path: &Path) -> Result<()> {
    let config = load_config(config_path)?;
    print!("{}", config.echo_text());
    println!("# ok");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Run { config, seed, out_dir, trials, jobs } => {
            cmd_run(&config, seed, out_dir, trials, jobs)
        }
        Cmd::Bounds { config, seed, out_dir } => cmd_bounds(&config, seed, out_dir),
        Cmd::T0 { m_smooth, alpha, r_theta, r } => cmd_t0(m_smooth, alpha, r_theta, r),
        Cmd::Validate { config } => cmd_validate(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
