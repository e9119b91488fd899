use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baseline::{RelayCandidates, DEFAULT_EXHAUSTIVE_CAP};
use crate::channel::{GeometryConfig, LinkLength, PathLossModel, RadioParams, RelayPlacement};
use crate::error::{Error, Result};
use crate::ga::{CrossoverKind, GaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Solver {
    /// GA with two-point crossover.
    #[serde(rename = "tp-ga")]
    TpGa,
    /// GA with one-point crossover.
    #[serde(rename = "op-ga")]
    OpGa,
    /// GA with whatever crossover `ga.crossover_kind` names.
    #[serde(rename = "ga")]
    Ga,
    #[serde(rename = "heuristic")]
    Heuristic,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "exhaustive")]
    Exhaustive,
}

impl Solver {
    pub const ALL: [Solver; 6] = [
        Solver::TpGa,
        Solver::OpGa,
        Solver::Ga,
        Solver::Heuristic,
        Solver::Random,
        Solver::Exhaustive,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Solver::TpGa => "tp-ga",
            Solver::OpGa => "op-ga",
            Solver::Ga => "ga",
            Solver::Heuristic => "heuristic",
            Solver::Random => "random",
            Solver::Exhaustive => "exhaustive",
        }
    }

    pub fn is_ga(&self) -> bool {
        matches!(self, Solver::TpGa | Solver::OpGa | Solver::Ga)
    }

    /// Random stream a solver draws from. All GA variants share one, so
    /// they start from the same initial population in a given iteration.
    pub fn seed_stream(&self) -> u64 {
        match self {
            Solver::TpGa | Solver::OpGa | Solver::Ga => 1,
            Solver::Heuristic => 2,
            Solver::Random => 3,
            Solver::Exhaustive => 4,
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Solver::ALL
            .into_iter()
            .find(|v| v.tag() == s.trim())
            .ok_or_else(|| Error::config("solvers", format!("unknown solver `{s}`")))
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Every knob of a simulation campaign. Serialized as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub cell_radius_m: f64,
    pub d2d_length_min_m: f64,
    pub d2d_length_max_m: f64,
    /// When set, every pair uses exactly this length instead of the range.
    pub d2d_fixed_length_m: Option<f64>,
    /// Fixed D2D lengths visited by a link-length sweep.
    pub sweep_lengths_m: Vec<f64>,
    pub n_cues: usize,
    pub n_pairs: usize,
    pub n_relays: usize,
    pub n_rbs: usize,
    pub rb_bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub rate_threshold_bps: f64,
    pub mcl_db: f64,
    pub relay_placement: RelayPlacement,
    pub relay_candidates: RelayCandidates,
    pub n_monte_carlo: usize,
    pub master_seed: u64,
    pub solvers: Vec<Solver>,
    pub exhaustive_cap: u64,
    /// Record solver wall time; disable for byte-reproducible `runs.csv`.
    pub record_wall_time: bool,
    pub ga: GaConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let radio = RadioParams::default();
        Self {
            cell_radius_m: 250.0,
            d2d_length_min_m: 20.0,
            d2d_length_max_m: 150.0,
            d2d_fixed_length_m: None,
            sweep_lengths_m: vec![20.0, 50.0, 100.0, 150.0, 200.0, 250.0],
            n_cues: 30,
            n_pairs: 50,
            n_relays: 50,
            n_rbs: radio.n_rbs,
            rb_bandwidth_hz: radio.rb_bandwidth_hz,
            tx_power_dbm: radio.tx_power_dbm,
            noise_psd_dbm_hz: radio.noise_psd_dbm_hz,
            rate_threshold_bps: radio.rate_threshold_bps,
            mcl_db: PathLossModel::default().mcl_db,
            relay_placement: RelayPlacement::Uniform,
            relay_candidates: RelayCandidates::All,
            n_monte_carlo: 100,
            master_seed: 1,
            solvers: vec![
                Solver::TpGa,
                Solver::OpGa,
                Solver::Heuristic,
                Solver::Random,
            ],
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP as u64,
            record_wall_time: true,
            ga: GaConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    pub fn geometry(&self) -> GeometryConfig {
        GeometryConfig {
            cell_radius_m: self.cell_radius_m,
            link_length: match self.d2d_fixed_length_m {
                Some(length_m) => LinkLength::Fixed { length_m },
                None => LinkLength::Uniform {
                    min_m: self.d2d_length_min_m,
                    max_m: self.d2d_length_max_m,
                },
            },
            n_cues: self.n_cues,
            n_pairs: self.n_pairs,
            n_relays: self.n_relays,
            relay_placement: self.relay_placement,
        }
    }

    pub fn radio(&self) -> RadioParams {
        RadioParams {
            tx_power_dbm: self.tx_power_dbm,
            noise_psd_dbm_hz: self.noise_psd_dbm_hz,
            rb_bandwidth_hz: self.rb_bandwidth_hz,
            n_rbs: self.n_rbs,
            rate_threshold_bps: self.rate_threshold_bps,
        }
    }

    pub fn path_loss(&self) -> PathLossModel {
        PathLossModel::new(self.mcl_db)
    }

    /// GA settings for one solver; the TP/OP variants pin the crossover kind.
    pub fn ga_for(&self, solver: Solver) -> GaConfig {
        let mut ga = self.ga;
        match solver {
            Solver::TpGa => ga.crossover_kind = CrossoverKind::TwoPoint,
            Solver::OpGa => ga.crossover_kind = CrossoverKind::OnePoint,
            _ => {}
        }
        ga
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry().validate()?;
        self.radio().validate(self.n_cues)?;
        self.ga.validate()?;
        if !self.mcl_db.is_finite() {
            return Err(Error::config("mcl_db", "must be finite"));
        }
        if self.n_monte_carlo == 0 {
            return Err(Error::config("n_monte_carlo", "must be at least 1"));
        }
        if self.solvers.is_empty() {
            return Err(Error::config("solvers", "list is empty"));
        }
        let mut seen = self.solvers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.solvers.len() {
            return Err(Error::config("solvers", "contains duplicates"));
        }
        if let RelayCandidates::Nearest { k } = self.relay_candidates {
            if k == 0 {
                return Err(Error::config(
                    "relay_candidates",
                    "nearest k must be at least 1",
                ));
            }
        }
        Ok(())
    }
}
