use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use relay_d2d::ga::CrossoverKind;
use relay_d2d::harness::{
    export, export_sweep, run_campaign, summarize, sweep_link_length, ScenarioConfig, Solver,
};
use relay_d2d::Result;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Crossover {
    Op,
    Tp,
}

/// Monte Carlo comparison of RB allocation solvers for relay-aided D2D underlay.
#[derive(Debug, Parser)]
#[command(name = "relay-d2d", version)]
struct Cli {
    /// TOML scenario file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated solvers: tp-ga, op-ga, ga, heuristic, random, exhaustive.
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,
    /// Monte Carlo iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// Run a link-length sweep over the configured lengths instead of one campaign.
    #[arg(long)]
    sweep: bool,
    /// Comma-separated fixed D2D lengths in meters; implies `--sweep`.
    #[arg(long, value_delimiter = ',')]
    sweep_lengths: Option<Vec<f64>>,
    /// Output path prefix, e.g. `out/` or `out/exp1_`.
    #[arg(long, default_value = "out/")]
    out_prefix: String,
    /// Crossover used by the `ga` solver.
    #[arg(long, value_enum)]
    ga_crossover: Option<Crossover>,
    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    print_default_config: bool,
}

fn build_config(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = cli.iterations {
        cfg.n_monte_carlo = n;
    }
    if let Some(list) = &cli.solvers {
        cfg.solvers = list
            .iter()
            .map(|s| s.parse::<Solver>())
            .collect::<Result<_>>()?;
    }
    if let Some(lengths) = &cli.sweep_lengths {
        cfg.sweep_lengths_m = lengths.clone();
    }
    if let Some(kind) = cli.ga_crossover {
        cfg.ga.crossover_kind = match kind {
            Crossover::Op => CrossoverKind::OnePoint,
            Crossover::Tp => CrossoverKind::TwoPoint,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    if cli.print_default_config {
        print!("{}", ScenarioConfig::default().to_toml_string());
        return Ok(());
    }
    let cfg = build_config(&cli)?;

    if cli.sweep || cli.sweep_lengths.is_some() {
        let points = sweep_link_length(&cfg, &cfg.sweep_lengths_m)?;
        let path = export_sweep(&points, &cli.out_prefix)?;
        for p in &points {
            for (solver, m) in &p.mean_sum_rate_bps {
                println!(
                    "{:>7.1} m  {:<10} {:.4} Mbit/s",
                    p.length_m,
                    solver,
                    m / 1e6
                );
            }
        }
        println!("wrote {}", path.display());
        return Ok(());
    }

    let reports = run_campaign(&cfg)?;
    let summary = summarize(&reports)?;
    let paths = export(&reports, &summary, &cli.out_prefix)?;
    for s in &summary.solvers {
        let conv = s
            .convergence
            .map(|b| format!("  conv median {}", b.median))
            .unwrap_or_default();
        println!(
            "{:<10} mean {:.4} Mbit/s  median {:.4} Mbit/s{}",
            s.solver,
            s.mean_sum_rate_bps / 1e6,
            s.median_sum_rate_bps / 1e6,
            conv
        );
    }
    for g in &summary.gains {
        println!("{} over {}: {:+.2}%", g.solver, g.baseline, g.percent);
    }
    println!(
        "wrote {} files with prefix `{}`",
        paths.len(),
        cli.out_prefix
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
