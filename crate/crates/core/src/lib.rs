//! Joint uplink resource-block allocation for cellular users and
//! relay-aided D2D pairs.
//!
//! - [`channel`]: geometry, path loss, noise.
//! - [`allocation`]: interference, Shannon rates and the sum-rate objective.
//! - [`ga`]: the genetic algorithm solver.
//! - [`baseline`]: greedy heuristic, random baseline and exhaustive oracle.
//! - [`harness`]: Monte Carlo campaigns, statistics, CSV/JSON export.
//!
//! ```
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//! use relay_d2d::channel::{GeometryConfig, PathLossModel};
//! use relay_d2d::ga::{run_ga, GaConfig};
//! use relay_d2d::{RadioParams, Topology};
//!
//! let topo = Topology::generate(&GeometryConfig::default(), PathLossModel::default(), &mut ChaCha8Rng::seed_from_u64(1))?;
//! let cfg = GaConfig { max_generations: 50, ..GaConfig::default() };
//! let out = run_ga(&topo, &RadioParams::default(), &cfg, &mut ChaCha8Rng::seed_from_u64(2))?;
//! assert!(out.report.sum_rate > 0.0);
//! # Ok::<(), relay_d2d::Error>(())
//! ```

pub mod allocation;
pub mod baseline;
pub mod channel;
pub mod error;
pub mod ga;
pub mod harness;

pub use allocation::{evaluate, Allocation, Mode, RateReport};
pub use channel::{PathLossModel, Position, RadioParams, Topology};
pub use error::{Error, Result};
