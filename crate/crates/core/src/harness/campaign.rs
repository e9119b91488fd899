use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, Solver};
use super::stats::mean;
use crate::allocation::RateReport;
use crate::baseline::{run_exhaustive, run_heuristic, run_random};
use crate::channel::{linear_to_db, RadioParams, Topology};
use crate::error::{Error, Result};
use crate::ga::run_ga;

/// Stream id of topology sampling; solver streams come from [`Solver::seed_stream`].
pub const TOPOLOGY_STREAM: u64 = 0;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of `stream` in Monte Carlo iteration `iteration`:
/// `mix(mix(mix(master) ^ iteration) ^ stream)` with the SplitMix64 finalizer.
/// Streams are independent, so adding a solver never shifts topology draws.
pub fn derive_seed(master: u64, iteration: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ iteration) ^ stream)
}

/// Outcome of one solver on one topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: usize,
    pub solver: String,
    pub seed: u64,
    pub sum_rate_bps: f64,
    pub cue_rates_bps: Vec<f64>,
    pub due_rates_bps: Vec<f64>,
    /// `10 log10` of each pair's received interference in mW.
    pub interference_dbm: Vec<f64>,
    pub feasible: bool,
    pub convergence_gen: Option<usize>,
    pub trace: Option<Vec<f64>>,
    pub wall_ms: f64,
}

impl RunReport {
    fn from_rates(
        run_id: usize,
        solver: Solver,
        seed: u64,
        report: RateReport,
        trace: Option<(Vec<f64>, usize)>,
        wall_ms: f64,
    ) -> Self {
        let (trace, convergence_gen) = match trace {
            Some((t, g)) => (Some(t), Some(g)),
            None => (None, None),
        };
        Self {
            run_id,
            solver: solver.tag().to_string(),
            seed,
            sum_rate_bps: report.sum_rate,
            feasible: report.feasible(),
            interference_dbm: report
                .due_interference
                .iter()
                .map(|&i| linear_to_db(i))
                .collect(),
            cue_rates_bps: report.cue_rates,
            due_rates_bps: report.due_rates,
            convergence_gen,
            trace,
            wall_ms,
        }
    }
}

/// Runs one solver on a fixed topology.
pub fn run_solver(
    solver: Solver,
    topo: &Topology,
    radio: &RadioParams,
    config: &ScenarioConfig,
    run_id: usize,
    seed: u64,
) -> Result<RunReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let started = Instant::now();
    let (report, trace) = match solver {
        Solver::TpGa | Solver::OpGa | Solver::Ga => {
            let out = run_ga(topo, radio, &config.ga_for(solver), &mut rng)?;
            let trace = (
                out.trace.best_fitness_per_generation,
                out.trace.generation_of_convergence,
            );
            (out.report, Some(trace))
        }
        Solver::Heuristic => (
            run_heuristic(topo, radio, config.relay_candidates, &mut rng)?.report,
            None,
        ),
        Solver::Random => (
            run_random(topo, radio, config.relay_candidates, &mut rng)?.report,
            None,
        ),
        Solver::Exhaustive => (
            run_exhaustive(topo, radio, config.exhaustive_cap as u128)?.report,
            None,
        ),
    };
    let wall_ms = if config.record_wall_time {
        started.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(RunReport::from_rates(
        run_id, solver, seed, report, trace, wall_ms,
    ))
}

/// The topology of Monte Carlo iteration `iteration`.
pub fn iteration_topology(config: &ScenarioConfig, iteration: usize) -> Result<Topology> {
    let seed = derive_seed(config.master_seed, iteration as u64, TOPOLOGY_STREAM);
    Topology::generate(
        &config.geometry(),
        config.path_loss(),
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

fn run_iteration(config: &ScenarioConfig, iteration: usize) -> Result<Vec<RunReport>> {
    let topo = iteration_topology(config, iteration)?;
    let radio = config.radio();
    config
        .solvers
        .iter()
        .map(|&solver| {
            let seed = derive_seed(config.master_seed, iteration as u64, solver.seed_stream());
            run_solver(solver, &topo, &radio, config, iteration, seed)
        })
        .collect()
}

/// Runs every configured solver on `n_monte_carlo` shared topologies.
/// Reports come back ordered by run id, then by the configured solver order.
pub fn run_campaign(config: &ScenarioConfig) -> Result<Vec<RunReport>> {
    config.validate()?;
    let per_iteration = (0..config.n_monte_carlo)
        .into_par_iter()
        .map(|it| run_iteration(config, it))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_iteration.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub length_m: f64,
    /// `(solver, mean sum rate)` in configured solver order.
    pub mean_sum_rate_bps: Vec<(String, f64)>,
}

impl SweepPoint {
    pub fn mean_of(&self, solver: &str) -> Option<f64> {
        self.mean_sum_rate_bps
            .iter()
            .find(|(s, _)| s == solver)
            .map(|p| p.1)
    }
}

/// One campaign per fixed D2D link length.
pub fn sweep_link_length(config: &ScenarioConfig, lengths: &[f64]) -> Result<Vec<SweepPoint>> {
    if lengths.is_empty() {
        return Err(Error::config("sweep_lengths_m", "list is empty"));
    }
    lengths
        .iter()
        .map(|&length_m| {
            let cfg = ScenarioConfig {
                d2d_fixed_length_m: Some(length_m),
                ..config.clone()
            };
            let reports = run_campaign(&cfg)?;
            let means = cfg
                .solvers
                .iter()
                .map(|s| {
                    let rates: Vec<f64> = reports
                        .iter()
                        .filter(|r| r.solver == s.tag())
                        .map(|r| r.sum_rate_bps)
                        .collect();
                    Ok((s.tag().to_string(), mean(&rates)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint {
                length_m,
                mean_sum_rate_bps: means,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            n_cues: 4,
            n_pairs: 5,
            n_relays: 5,
            n_rbs: 6,
            n_monte_carlo: 3,
            record_wall_time: false,
            ga: crate::ga::GaConfig {
                max_generations: 30,
                population_size: 12,
                ..Default::default()
            },
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn seeds_differ_by_stream_and_iteration() {
        let a = derive_seed(1, 0, 0);
        assert_ne!(a, derive_seed(1, 0, 1));
        assert_ne!(a, derive_seed(1, 1, 0));
        assert_ne!(a, derive_seed(2, 0, 0));
        assert_eq!(a, derive_seed(1, 0, 0));
    }

    #[test]
    fn campaign_shape_and_determinism() {
        let cfg = small();
        let a = run_campaign(&cfg).unwrap();
        assert_eq!(a.len(), 3 * 4);
        let b = run_campaign(&cfg).unwrap();
        assert_eq!(a, b);
        for (i, r) in a.iter().enumerate() {
            assert_eq!(r.run_id, i / 4);
            assert_eq!(r.solver, cfg.solvers[i % 4].tag());
            assert_eq!(r.convergence_gen.is_some(), cfg.solvers[i % 4].is_ga());
            assert_eq!(r.interference_dbm.len(), 5);
        }
    }

    #[test]
    fn adding_a_solver_keeps_topologies_and_other_streams() {
        let cfg = ScenarioConfig {
            solvers: vec![Solver::Random],
            ..small()
        };
        let alone = run_campaign(&cfg).unwrap();
        let both = run_campaign(&ScenarioConfig {
            solvers: vec![Solver::Heuristic, Solver::Random],
            ..small()
        })
        .unwrap();
        let random: Vec<_> = both.into_iter().filter(|r| r.solver == "random").collect();
        assert_eq!(alone, random);
    }

    #[test]
    fn solvers_share_a_topology() {
        let cfg = small();
        let topo = iteration_topology(&cfg, 1).unwrap();
        let radio = cfg.radio();
        let seed = derive_seed(cfg.master_seed, 1, Solver::Random.seed_stream());
        let direct = run_solver(Solver::Random, &topo, &radio, &cfg, 1, seed).unwrap();
        let from_campaign = run_campaign(&cfg)
            .unwrap()
            .into_iter()
            .find(|r| r.run_id == 1 && r.solver == "random")
            .unwrap();
        assert_eq!(direct, from_campaign);
    }

    #[test]
    fn sweep_single_point_matches_campaign() {
        let cfg = ScenarioConfig {
            n_monte_carlo: 1,
            ..small()
        };
        let sweep = sweep_link_length(&cfg, &[80.0]).unwrap();
        let reports = run_campaign(&ScenarioConfig {
            d2d_fixed_length_m: Some(80.0),
            ..cfg.clone()
        })
        .unwrap();
        for r in reports {
            assert_eq!(sweep[0].mean_of(&r.solver).unwrap(), r.sum_rate_bps);
        }
    }

    #[test]
    fn invalid_sweep_length() {
        let cfg = small();
        assert!(matches!(
            sweep_link_length(&cfg, &[900.0]),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            sweep_link_length(&cfg, &[]),
            Err(Error::Config {
                field: "sweep_lengths_m",
                ..
            })
        ));
    }
}
