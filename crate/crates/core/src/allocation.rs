//! Allocations, interference and achievable rates.
//!
//! All arithmetic is linear (mW, bit/s). Each CUE and each D2D pair occupies
//! exactly one RB. A relayed pair runs both hops on its RB at the same time
//! (full-duplex), so its transmitter and its relay both radiate on that RB.

use serde::{Deserialize, Serialize};

use crate::channel::{NodeId, RadioParams, Topology};
use crate::error::{Error, Result};

/// Transmission mode of a D2D pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    Direct,
    /// Two-hop via the relay with this index.
    Relayed(usize),
}

/// One complete assignment of RBs and modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Allocation {
    pub cue_rb: Vec<usize>,
    pub due_rb: Vec<usize>,
    pub due_mode: Vec<Mode>,
}

impl Allocation {
    /// Checks lengths, index ranges and CUE orthogonality.
    pub fn validate(&self, topo: &Topology, n_rbs: usize) -> Result<()> {
        if self.cue_rb.len() != topo.n_cues() {
            return Err(Error::Structural(format!(
                "{} CUE RBs for {} CUEs",
                self.cue_rb.len(),
                topo.n_cues()
            )));
        }
        if self.due_rb.len() != topo.n_pairs() || self.due_mode.len() != topo.n_pairs() {
            return Err(Error::Structural(format!(
                "{} pair RBs and {} pair modes for {} pairs",
                self.due_rb.len(),
                self.due_mode.len(),
                topo.n_pairs()
            )));
        }
        let mut taken = vec![false; n_rbs];
        for (c, &rb) in self.cue_rb.iter().enumerate() {
            if rb >= n_rbs {
                return Err(Error::Structural(format!("CUE {c} on RB {rb} of {n_rbs}")));
            }
            if std::mem::replace(&mut taken[rb], true) {
                return Err(Error::Structural(format!("RB {rb} assigned to two CUEs")));
            }
        }
        for (d, &rb) in self.due_rb.iter().enumerate() {
            if rb >= n_rbs {
                return Err(Error::Structural(format!("pair {d} on RB {rb} of {n_rbs}")));
            }
        }
        for (d, mode) in self.due_mode.iter().enumerate() {
            if let Mode::Relayed(l) = *mode {
                if l >= topo.n_relays() {
                    return Err(Error::Structural(format!(
                        "pair {d} uses relay {l} of {}",
                        topo.n_relays()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Read access to "who transmits on which RB", shared by complete and
/// partial allocations.
pub trait Occupancy {
    fn n_pairs(&self) -> usize;
    fn cue_on_rb(&self, rb: usize) -> Option<usize>;
    /// `(rb, mode)` of pair `d`, or `None` while it is unassigned.
    fn pair_slot(&self, d: usize) -> Option<(usize, Mode)>;
}

impl Occupancy for Allocation {
    fn n_pairs(&self) -> usize {
        self.due_rb.len()
    }

    fn cue_on_rb(&self, rb: usize) -> Option<usize> {
        self.cue_rb.iter().position(|&r| r == rb)
    }

    fn pair_slot(&self, d: usize) -> Option<(usize, Mode)> {
        Some((self.due_rb[d], self.due_mode[d]))
    }
}

/// An allocation under construction: every CUE placed, pairs filled in one
/// at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialAllocation {
    cue_rb: Vec<usize>,
    cue_by_rb: Vec<Option<usize>>,
    slots: Vec<Option<(usize, Mode)>>,
}

impl PartialAllocation {
    pub fn new(cue_rb: Vec<usize>, n_rbs: usize, n_pairs: usize) -> Self {
        let mut cue_by_rb = vec![None; n_rbs];
        for (c, &rb) in cue_rb.iter().enumerate() {
            cue_by_rb[rb] = Some(c);
        }
        Self {
            cue_rb,
            cue_by_rb,
            slots: vec![None; n_pairs],
        }
    }

    pub fn assign(&mut self, pair: usize, rb: usize, mode: Mode) {
        self.slots[pair] = Some((rb, mode));
    }

    pub fn is_assigned(&self, pair: usize) -> bool {
        self.slots[pair].is_some()
    }

    /// Converts to a complete allocation once every pair has a slot.
    pub fn complete(self) -> Result<Allocation> {
        let mut due_rb = Vec::with_capacity(self.slots.len());
        let mut due_mode = Vec::with_capacity(self.slots.len());
        for (d, slot) in self.slots.into_iter().enumerate() {
            let (rb, mode) =
                slot.ok_or_else(|| Error::Structural(format!("pair {d} left unassigned")))?;
            due_rb.push(rb);
            due_mode.push(mode);
        }
        Ok(Allocation {
            cue_rb: self.cue_rb,
            due_rb,
            due_mode,
        })
    }
}

impl Occupancy for PartialAllocation {
    fn n_pairs(&self) -> usize {
        self.slots.len()
    }

    fn cue_on_rb(&self, rb: usize) -> Option<usize> {
        self.cue_by_rb[rb]
    }

    fn pair_slot(&self, d: usize) -> Option<(usize, Mode)> {
        self.slots[d]
    }
}

/// Full allocation with an RB → CUE lookup table.
struct Indexed<'a> {
    alloc: &'a Allocation,
    cue_by_rb: Vec<Option<usize>>,
}

impl<'a> Indexed<'a> {
    fn new(alloc: &'a Allocation, n_rbs: usize) -> Self {
        let mut cue_by_rb = vec![None; n_rbs];
        for (c, &rb) in alloc.cue_rb.iter().enumerate() {
            cue_by_rb[rb] = Some(c);
        }
        Self { alloc, cue_by_rb }
    }
}

impl Occupancy for Indexed<'_> {
    fn n_pairs(&self) -> usize {
        self.alloc.due_rb.len()
    }

    fn cue_on_rb(&self, rb: usize) -> Option<usize> {
        self.cue_by_rb[rb]
    }

    fn pair_slot(&self, d: usize) -> Option<(usize, Mode)> {
        Some((self.alloc.due_rb[d], self.alloc.due_mode[d]))
    }
}

/// A receiving D2D-side node. The pair index identifies whose own
/// transmissions are excluded from the interference sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Victim {
    /// The receiver of pair `d` (direct link or second hop).
    Receiver(usize),
    /// Relay `relay` receiving the first hop of `pair`.
    Relay { pair: usize, relay: usize },
}

impl Victim {
    fn pair(&self) -> usize {
        match *self {
            Victim::Receiver(d) => d,
            Victim::Relay { pair, .. } => pair,
        }
    }

    fn node(&self, topo: &Topology) -> NodeId {
        match *self {
            Victim::Receiver(d) => topo.rx(d),
            Victim::Relay { relay, .. } => topo.relay(relay),
        }
    }
}

/// D2D interference received at the base station on `rb`.
pub fn interference_at_bs(
    alloc: &Allocation,
    topo: &Topology,
    params: &RadioParams,
    rb: usize,
) -> f64 {
    bs_interference(alloc, topo, params.tx_power_mw(), rb)
}

/// Interference received by `victim` on `rb` from the CUE on that RB and
/// every other pair (and its relay) sharing it.
pub fn interference_at_node(
    alloc: &Allocation,
    topo: &Topology,
    params: &RadioParams,
    rb: usize,
    victim: Victim,
) -> f64 {
    node_interference(alloc, topo, params.tx_power_mw(), rb, victim)
}

pub(crate) fn bs_interference<O: Occupancy>(occ: &O, topo: &Topology, p_mw: f64, rb: usize) -> f64 {
    let bs = topo.bs();
    let mut total = 0.0;
    for d in 0..occ.n_pairs() {
        match occ.pair_slot(d) {
            Some((r, mode)) if r == rb => {
                total += p_mw * topo.gain(topo.tx(d), bs);
                if let Mode::Relayed(l) = mode {
                    total += p_mw * topo.gain(topo.relay(l), bs);
                }
            }
            _ => {}
        }
    }
    total
}

pub(crate) fn node_interference<O: Occupancy>(
    occ: &O,
    topo: &Topology,
    p_mw: f64,
    rb: usize,
    victim: Victim,
) -> f64 {
    let node = victim.node(topo);
    let own = victim.pair();
    let mut total = match occ.cue_on_rb(rb) {
        Some(c) => p_mw * topo.gain(topo.cue(c), node),
        None => 0.0,
    };
    for i in 0..occ.n_pairs() {
        if i == own {
            continue;
        }
        match occ.pair_slot(i) {
            Some((r, mode)) if r == rb => {
                total += p_mw * topo.gain(topo.tx(i), node);
                if let Mode::Relayed(l) = mode {
                    total += p_mw * topo.gain(topo.relay(l), node);
                }
            }
            _ => {}
        }
    }
    total
}

/// `B log2(1 + S / (I + N))` in bit/s.
#[inline]
pub fn shannon_rate(signal_mw: f64, interference_mw: f64, noise_mw: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + signal_mw / (interference_mw + noise_mw)).log2()
}

/// Achieved rate of one pair, with the hop rates when relayed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRate {
    pub rate: f64,
    /// `(first hop, second hop)` for relayed pairs.
    pub hops: Option<(f64, f64)>,
    /// Interference at the pair's receiver.
    pub rx_interference: f64,
}

/// Rate pair `d` would get on `rb` in `mode`, given the rest of `occ`.
/// Pair `d`'s own slot in `occ` (if any) is ignored.
pub(crate) fn pair_rate_in<O: Occupancy>(
    occ: &O,
    topo: &Topology,
    params: &RadioParams,
    d: usize,
    rb: usize,
    mode: Mode,
) -> PairRate {
    let p = params.tx_power_mw();
    let noise = params.noise_power_mw();
    let bw = params.rb_bandwidth_hz;
    let rx_interference = node_interference(occ, topo, p, rb, Victim::Receiver(d));
    match mode {
        Mode::Direct => PairRate {
            rate: shannon_rate(
                p * topo.gain(topo.tx(d), topo.rx(d)),
                rx_interference,
                noise,
                bw,
            ),
            hops: None,
            rx_interference,
        },
        Mode::Relayed(l) => {
            let relay = topo.relay(l);
            let at_relay = node_interference(occ, topo, p, rb, Victim::Relay { pair: d, relay: l });
            let first = shannon_rate(p * topo.gain(topo.tx(d), relay), at_relay, noise, bw);
            let second = shannon_rate(p * topo.gain(relay, topo.rx(d)), rx_interference, noise, bw);
            PairRate {
                rate: first.min(second),
                hops: Some((first, second)),
                rx_interference,
            }
        }
    }
}

/// Achieved rate of pair `pair` under `alloc`.
pub fn pair_rate(
    alloc: &Allocation,
    topo: &Topology,
    params: &RadioParams,
    pair: usize,
) -> Result<f64> {
    if pair >= alloc.due_rb.len() || pair >= topo.n_pairs() {
        return Err(Error::Structural(format!("pair index {pair} out of range")));
    }
    if let Mode::Relayed(l) = alloc.due_mode[pair] {
        if l >= topo.n_relays() {
            return Err(Error::Structural(format!(
                "pair {pair} uses relay {l} of {}",
                topo.n_relays()
            )));
        }
    }
    let rb = alloc.due_rb[pair];
    if rb >= params.n_rbs {
        return Err(Error::Structural(format!(
            "pair {pair} on RB {rb} of {}",
            params.n_rbs
        )));
    }
    Ok(pair_rate_in(alloc, topo, params, pair, rb, alloc.due_mode[pair]).rate)
}

/// Per-link outcome of an allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub cue_rates: Vec<f64>,
    pub due_rates: Vec<f64>,
    /// Interference at each pair's final receiver, mW.
    pub due_interference: Vec<f64>,
    /// `(first hop, second hop)` for relayed pairs.
    pub relay_hops: Vec<Option<(f64, f64)>>,
    pub sum_rate: f64,
    pub cue_feasible: Vec<bool>,
    pub due_feasible: Vec<bool>,
}

impl RateReport {
    /// Every CUE meets the rate threshold.
    pub fn cues_feasible(&self) -> bool {
        self.cue_feasible.iter().all(|&f| f)
    }

    /// Every pair meets the rate threshold.
    pub fn pairs_feasible(&self) -> bool {
        self.due_feasible.iter().all(|&f| f)
    }

    pub fn feasible(&self) -> bool {
        self.cues_feasible() && self.pairs_feasible()
    }
}

/// Scores an allocation: every CUE and pair rate, pair interference, the
/// sum-rate objective and threshold feasibility.
pub fn evaluate(alloc: &Allocation, topo: &Topology, params: &RadioParams) -> Result<RateReport> {
    alloc.validate(topo, params.n_rbs)?;
    let occ = Indexed::new(alloc, params.n_rbs);
    let p = params.tx_power_mw();
    let noise = params.noise_power_mw();
    let bw = params.rb_bandwidth_hz;
    let threshold = params.rate_threshold_bps;

    let cue_rates: Vec<f64> = alloc
        .cue_rb
        .iter()
        .enumerate()
        .map(|(c, &rb)| {
            let signal = p * topo.gain(topo.cue(c), topo.bs());
            shannon_rate(signal, bs_interference(&occ, topo, p, rb), noise, bw)
        })
        .collect();

    let n_pairs = alloc.due_rb.len();
    let mut due_rates = Vec::with_capacity(n_pairs);
    let mut due_interference = Vec::with_capacity(n_pairs);
    let mut relay_hops = Vec::with_capacity(n_pairs);
    for d in 0..n_pairs {
        let r = pair_rate_in(&occ, topo, params, d, alloc.due_rb[d], alloc.due_mode[d]);
        due_rates.push(r.rate);
        due_interference.push(r.rx_interference);
        relay_hops.push(r.hops);
    }

    let sum_rate = cue_rates.iter().sum::<f64>() + due_rates.iter().sum::<f64>();
    Ok(RateReport {
        cue_feasible: cue_rates.iter().map(|&r| r >= threshold).collect(),
        due_feasible: due_rates.iter().map(|&r| r >= threshold).collect(),
        cue_rates,
        due_rates,
        due_interference,
        relay_hops,
        sum_rate,
    })
}
