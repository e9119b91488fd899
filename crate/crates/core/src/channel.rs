//! Geometry, path loss and radio parameters.
//!
//! Every link gain in the crate comes from [`PathLossModel::link_gain`], a
//! pure function of distance. Topologies are generated once per Monte Carlo
//! iteration and then shared read-only by every solver.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Retry cap for placing a D2D receiver (or near-pair relay) inside the cell.
pub const MAX_PLACEMENT_RETRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// 3GPP macro path loss `128.1 + 37.6 log10(d_km)` with a minimum coupling
/// loss floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub mcl_db: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self { mcl_db: 70.0 }
    }
}

impl PathLossModel {
    pub fn new(mcl_db: f64) -> Self {
        Self { mcl_db }
    }

    /// Path loss in dB at `distance_m` meters, never below the MCL floor.
    pub fn path_loss_db(&self, distance_m: f64) -> Result<f64> {
        if !distance_m.is_finite() || distance_m <= 0.0 {
            return Err(Error::Domain(format!(
                "path loss needs a positive finite distance, got {distance_m}"
            )));
        }
        let loss = 128.1 + 37.6 * (distance_m / 1000.0).log10();
        Ok(loss.max(self.mcl_db))
    }

    /// Linear power gain `10^(-PL/10)`.
    pub fn link_gain(&self, distance_m: f64) -> Result<f64> {
        Ok(db_to_linear(-self.path_loss_db(distance_m)?))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10 log10(mw)`; zero maps to negative infinity.
pub fn linear_to_db(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Shared by CUEs, DUEs and relays.
    pub tx_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub rb_bandwidth_hz: f64,
    pub n_rbs: usize,
    pub rate_threshold_bps: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            tx_power_dbm: 20.0,
            noise_psd_dbm_hz: -174.0,
            rb_bandwidth_hz: 180e3,
            n_rbs: 50,
            rate_threshold_bps: 180e3,
        }
    }
}

impl RadioParams {
    pub fn validate(&self, n_cues: usize) -> Result<()> {
        if !self.rb_bandwidth_hz.is_finite() || self.rb_bandwidth_hz <= 0.0 {
            return Err(Error::config(
                "rb_bandwidth_hz",
                "must be positive and finite",
            ));
        }
        if self.n_rbs == 0 {
            return Err(Error::config("n_rbs", "must be at least 1"));
        }
        if self.n_rbs < n_cues {
            return Err(Error::config(
                "n_rbs",
                format!("{} RBs cannot host {} orthogonal CUEs", self.n_rbs, n_cues),
            ));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::config("tx_power_dbm", "must be finite"));
        }
        if !self.noise_psd_dbm_hz.is_finite() {
            return Err(Error::config("noise_psd_dbm_hz", "must be finite"));
        }
        if !self.rate_threshold_bps.is_finite() || self.rate_threshold_bps < 0.0 {
            return Err(Error::config(
                "rate_threshold_bps",
                "must be non-negative and finite",
            ));
        }
        Ok(())
    }

    pub fn tx_power_mw(&self) -> f64 {
        db_to_linear(self.tx_power_dbm)
    }

    /// Thermal noise over one RB, in mW.
    pub fn noise_power_mw(&self) -> f64 {
        noise_power_linear(self)
    }
}

pub fn noise_power_linear(params: &RadioParams) -> f64 {
    db_to_linear(params.noise_psd_dbm_hz + 10.0 * params.rb_bandwidth_hz.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkLength {
    /// Receiver distance drawn uniformly from `[min_m, max_m]`.
    Uniform { min_m: f64, max_m: f64 },
    /// Every pair separated by exactly this distance.
    Fixed { length_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelayPlacement {
    /// Uniform over the cell disc.
    Uniform,
    /// Relay `l` lies uniformly within `radius_m` of the midpoint of pair `l mod D`.
    NearPair { radius_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub cell_radius_m: f64,
    pub link_length: LinkLength,
    pub n_cues: usize,
    pub n_pairs: usize,
    pub n_relays: usize,
    pub relay_placement: RelayPlacement,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            cell_radius_m: 250.0,
            link_length: LinkLength::Uniform {
                min_m: 20.0,
                max_m: 150.0,
            },
            n_cues: 30,
            n_pairs: 50,
            n_relays: 50,
            relay_placement: RelayPlacement::Uniform,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        let radius = self.cell_radius_m;
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::config(
                "cell_radius_m",
                "must be positive and finite",
            ));
        }
        let (lo, hi) = match self.link_length {
            LinkLength::Uniform { min_m, max_m } => (min_m, max_m),
            LinkLength::Fixed { length_m } => (length_m, length_m),
        };
        if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || lo > hi {
            return Err(Error::config(
                "d2d_length",
                format!("need 0 < min <= max, got [{lo}, {hi}]"),
            ));
        }
        if hi > 2.0 * radius {
            return Err(Error::config(
                "d2d_length",
                format!(
                    "link length {hi} m exceeds the cell diameter {} m",
                    2.0 * radius
                ),
            ));
        }
        if let RelayPlacement::NearPair { radius_m } = self.relay_placement {
            if !radius_m.is_finite() || radius_m <= 0.0 {
                return Err(Error::config(
                    "relay_near_pair_radius_m",
                    "must be positive and finite",
                ));
            }
        }
        Ok(())
    }
}

/// Index into the node table of a [`Topology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Immutable single-cell scene with a dense table of pairwise gains.
///
/// Node order: base station, CUEs, D2D transmitters, D2D receivers, relays.
/// The diagonal of the gain table is zero, so a node never couples into
/// itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    positions: Vec<Position>,
    n_cues: usize,
    n_pairs: usize,
    n_relays: usize,
    gains: Vec<f64>,
    path_loss: PathLossModel,
}

impl Topology {
    /// Builds a topology from explicit coordinates. The base station is at
    /// `bs`; pairs are `(tx, rx)`.
    pub fn from_positions(
        bs: Position,
        cues: &[Position],
        pairs: &[(Position, Position)],
        relays: &[Position],
        path_loss: PathLossModel,
    ) -> Result<Self> {
        let mut positions = Vec::with_capacity(1 + cues.len() + 2 * pairs.len() + relays.len());
        positions.push(bs);
        positions.extend_from_slice(cues);
        positions.extend(pairs.iter().map(|p| p.0));
        positions.extend(pairs.iter().map(|p| p.1));
        positions.extend_from_slice(relays);
        if let Some(bad) = positions.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("non-finite node position {bad:?}")));
        }

        let n = positions.len();
        let mut gains = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = positions[i].distance(&positions[j]).max(f64::MIN_POSITIVE);
                let g = path_loss.link_gain(d)?;
                gains[i * n + j] = g;
                gains[j * n + i] = g;
            }
        }
        Ok(Self {
            positions,
            n_cues: cues.len(),
            n_pairs: pairs.len(),
            n_relays: relays.len(),
            gains,
            path_loss,
        })
    }

    /// Samples a random scene: BS at the origin, CUEs, D2D transmitters and
    /// (by default) relays uniform over the disc, receivers at a sampled
    /// distance and uniform angle from their transmitter.
    pub fn generate<R: Rng + ?Sized>(
        geometry: &GeometryConfig,
        path_loss: PathLossModel,
        rng: &mut R,
    ) -> Result<Self> {
        geometry.validate()?;
        let radius = geometry.cell_radius_m;

        let cues: Vec<Position> = (0..geometry.n_cues)
            .map(|_| uniform_in_disc(rng, Position::ORIGIN, radius))
            .collect();

        let mut pairs = Vec::with_capacity(geometry.n_pairs);
        for _ in 0..geometry.n_pairs {
            let tx = uniform_in_disc(rng, Position::ORIGIN, radius);
            let length = match geometry.link_length {
                LinkLength::Uniform { min_m, max_m } => rng.gen_range(min_m..=max_m),
                LinkLength::Fixed { length_m } => length_m,
            };
            let rx = place_inside_cell(rng, radius, "d2d_length", |rng| {
                let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                Position::new(tx.x + length * angle.cos(), tx.y + length * angle.sin())
            })?;
            pairs.push((tx, rx));
        }

        let mut relays = Vec::with_capacity(geometry.n_relays);
        for l in 0..geometry.n_relays {
            let relay = match geometry.relay_placement {
                RelayPlacement::NearPair { radius_m } if !pairs.is_empty() => {
                    let (tx, rx) = pairs[l % pairs.len()];
                    let mid = Position::new((tx.x + rx.x) / 2.0, (tx.y + rx.y) / 2.0);
                    place_inside_cell(rng, radius, "relay_near_pair_radius_m", |rng| {
                        uniform_in_disc(rng, mid, radius_m)
                    })?
                }
                _ => uniform_in_disc(rng, Position::ORIGIN, radius),
            };
            relays.push(relay);
        }

        Self::from_positions(Position::ORIGIN, &cues, &pairs, &relays, path_loss)
    }

    pub fn n_cues(&self) -> usize {
        self.n_cues
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_relays(&self) -> usize {
        self.n_relays
    }

    pub fn n_nodes(&self) -> usize {
        self.positions.len()
    }

    pub fn path_loss(&self) -> PathLossModel {
        self.path_loss
    }

    pub fn bs(&self) -> NodeId {
        NodeId(0)
    }

    pub fn cue(&self, c: usize) -> NodeId {
        debug_assert!(c < self.n_cues);
        NodeId(1 + c)
    }

    pub fn tx(&self, d: usize) -> NodeId {
        debug_assert!(d < self.n_pairs);
        NodeId(1 + self.n_cues + d)
    }

    pub fn rx(&self, d: usize) -> NodeId {
        debug_assert!(d < self.n_pairs);
        NodeId(1 + self.n_cues + self.n_pairs + d)
    }

    pub fn relay(&self, l: usize) -> NodeId {
        debug_assert!(l < self.n_relays);
        NodeId(1 + self.n_cues + 2 * self.n_pairs + l)
    }

    pub fn position(&self, node: NodeId) -> Position {
        self.positions[node.0]
    }

    /// Linear gain between two nodes; zero when `a == b`.
    #[inline]
    pub fn gain(&self, a: NodeId, b: NodeId) -> f64 {
        self.gains[a.0 * self.positions.len() + b.0]
    }

    pub fn pair_length(&self, d: usize) -> f64 {
        self.position(self.tx(d))
            .distance(&self.position(self.rx(d)))
    }
}

fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, center: Position, radius: f64) -> Position {
    let r = radius * rng.gen::<f64>().sqrt();
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    Position::new(center.x + r * angle.cos(), center.y + r * angle.sin())
}

fn place_inside_cell<R, F>(
    rng: &mut R,
    radius: f64,
    field: &'static str,
    mut draw: F,
) -> Result<Position>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Position,
{
    for _ in 0..MAX_PLACEMENT_RETRIES {
        let p = draw(rng);
        if p.distance(&Position::ORIGIN) <= radius {
            return Ok(p);
        }
    }
    Err(Error::config(
        field,
        format!("no in-cell placement found after {MAX_PLACEMENT_RETRIES} attempts"),
    ))
}
