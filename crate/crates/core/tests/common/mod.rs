//! Brute-force reference model built directly from node coordinates.
//!
//! Allocations are held as binary indicator tensors: `x[c][n]` puts CUE `c`
//! on RB `n`, `y[d][n]` runs pair `d` directly on RB `n` and `z[d][l][n]`
//! runs pair `d` through relay `l` on RB `n`. Nothing here calls into the
//! library's rate or interference code.

#![allow(dead_code)]

use relay_d2d::channel::NodeId;
use relay_d2d::{Allocation, Mode, Topology};

#[derive(Debug, Clone, Copy)]
pub struct Radio {
    pub tx_dbm: f64,
    pub noise_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub n_rbs: usize,
    pub threshold_bps: f64,
    pub mcl_db: f64,
}

impl Radio {
    pub fn reference() -> Self {
        Self {
            tx_dbm: 20.0,
            noise_dbm_hz: -174.0,
            bandwidth_hz: 180e3,
            n_rbs: 50,
            threshold_bps: 180e3,
            mcl_db: 70.0,
        }
    }

    fn power_mw(&self) -> f64 {
        10f64.powf(self.tx_dbm / 10.0)
    }

    fn noise_mw(&self) -> f64 {
        10f64.powf((self.noise_dbm_hz + 10.0 * self.bandwidth_hz.log10()) / 10.0)
    }
}

/// Node coordinates copied out of a topology.
#[derive(Debug, Clone)]
pub struct Scene {
    pub bs: (f64, f64),
    pub cues: Vec<(f64, f64)>,
    pub tx: Vec<(f64, f64)>,
    pub rx: Vec<(f64, f64)>,
    pub relays: Vec<(f64, f64)>,
}

impl Scene {
    pub fn of(topo: &Topology) -> Self {
        let xy = |id: NodeId| {
            let p = topo.position(id);
            (p.x, p.y)
        };
        Self {
            bs: xy(topo.bs()),
            cues: (0..topo.n_cues()).map(|c| xy(topo.cue(c))).collect(),
            tx: (0..topo.n_pairs()).map(|d| xy(topo.tx(d))).collect(),
            rx: (0..topo.n_pairs()).map(|d| xy(topo.rx(d))).collect(),
            relays: (0..topo.n_relays()).map(|l| xy(topo.relay(l))).collect(),
        }
    }
}

/// A transmitting or receiving node, compared by identity rather than position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Bs,
    Cue(usize),
    Tx(usize),
    Rx(usize),
    Relay(usize),
}

fn at(scene: &Scene, node: Node) -> (f64, f64) {
    match node {
        Node::Bs => scene.bs,
        Node::Cue(c) => scene.cues[c],
        Node::Tx(d) => scene.tx[d],
        Node::Rx(d) => scene.rx[d],
        Node::Relay(l) => scene.relays[l],
    }
}

fn gain(scene: &Scene, radio: &Radio, a: Node, b: Node) -> f64 {
    if a == b {
        return 0.0;
    }
    let (pa, pb) = (at(scene, a), at(scene, b));
    let km = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt() / 1000.0;
    let loss = (128.1 + 37.6 * km.log10()).max(radio.mcl_db);
    10f64.powf(-loss / 10.0)
}

fn rate(radio: &Radio, signal: f64, interference: f64) -> f64 {
    radio.bandwidth_hz * (1.0 + signal / (interference + radio.noise_mw())).log2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binary {
    pub x: Vec<Vec<u8>>,
    pub y: Vec<Vec<u8>>,
    pub z: Vec<Vec<Vec<u8>>>,
}

impl Binary {
    pub fn of(alloc: &Allocation, n_rbs: usize, n_relays: usize) -> Self {
        let mut x = vec![vec![0; n_rbs]; alloc.cue_rb.len()];
        for (c, &n) in alloc.cue_rb.iter().enumerate() {
            x[c][n] = 1;
        }
        let d_count = alloc.due_rb.len();
        let mut y = vec![vec![0; n_rbs]; d_count];
        let mut z = vec![vec![vec![0; n_rbs]; n_relays]; d_count];
        for d in 0..d_count {
            match alloc.due_mode[d] {
                Mode::Direct => y[d][alloc.due_rb[d]] = 1,
                Mode::Relayed(l) => z[d][l][alloc.due_rb[d]] = 1,
            }
        }
        Self { x, y, z }
    }

    /// One RB per link and at most one CUE per RB.
    pub fn is_valid(&self) -> bool {
        let n_rbs = self.x.first().or(self.y.first()).map_or(0, |r| r.len());
        let cue_ok = self
            .x
            .iter()
            .all(|row| row.iter().map(|&v| v as u32).sum::<u32>() == 1);
        let orth = (0..n_rbs).all(|n| self.x.iter().map(|row| row[n] as u32).sum::<u32>() <= 1);
        let pair_ok = (0..self.y.len()).all(|d| {
            let direct: u32 = self.y[d].iter().map(|&v| v as u32).sum();
            let relayed: u32 = self.z[d].iter().flatten().map(|&v| v as u32).sum();
            direct + relayed == 1
        });
        cue_ok && orth && pair_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub cue: Vec<f64>,
    pub pair: Vec<f64>,
    /// Interference at each pair's final receiver, mW.
    pub rx_interference: Vec<f64>,
    pub sum: f64,
    pub feasible: bool,
}

/// Transmitters active on RB `n` for pair `i`: its source, plus its relay if any.
fn pair_transmitters(b: &Binary, i: usize, n: usize) -> Vec<Node> {
    let mut out = Vec::new();
    let relayed: Vec<usize> = (0..b.z[i].len()).filter(|&l| b.z[i][l][n] == 1).collect();
    if b.y[i][n] == 1 || !relayed.is_empty() {
        out.push(Node::Tx(i));
    }
    out.extend(relayed.into_iter().map(Node::Relay));
    out
}

/// The link whose own transmitters a victim ignores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Own {
    Cue(usize),
    Pair(usize),
}

fn received(scene: &Scene, radio: &Radio, b: &Binary, n: usize, victim: Node, own: Own) -> f64 {
    let p = radio.power_mw();
    let mut total = 0.0;
    for c in 0..b.x.len() {
        if b.x[c][n] == 1 && own != Own::Cue(c) {
            total += p * gain(scene, radio, Node::Cue(c), victim);
        }
    }
    for i in 0..b.y.len() {
        if own == Own::Pair(i) {
            continue;
        }
        for t in pair_transmitters(b, i, n) {
            total += p * gain(scene, radio, t, victim);
        }
    }
    total
}

/// Interference on RB `n` at pair `pair`'s receiver, or at `relay` when given.
pub fn pair_side_interference(
    scene: &Scene,
    radio: &Radio,
    b: &Binary,
    n: usize,
    pair: usize,
    relay: Option<usize>,
) -> f64 {
    let victim = relay.map_or(Node::Rx(pair), Node::Relay);
    received(scene, radio, b, n, victim, Own::Pair(pair))
}

/// D2D interference at the base station on RB `n`.
pub fn bs_interference(scene: &Scene, radio: &Radio, b: &Binary, n: usize) -> f64 {
    let p = radio.power_mw();
    (0..b.y.len())
        .flat_map(|i| pair_transmitters(b, i, n))
        .map(|t| p * gain(scene, radio, t, Node::Bs))
        .sum()
}

/// Sum rate minus `alpha` times every link's shortfall below the threshold.
pub fn penalized(radio: &Radio, rates: &Rates, alpha_cue: f64, alpha_pair: f64) -> f64 {
    let short = |r: &f64| (r - radio.threshold_bps).min(0.0);
    rates.sum
        + alpha_cue * rates.cue.iter().map(short).sum::<f64>()
        + alpha_pair * rates.pair.iter().map(short).sum::<f64>()
}

pub fn evaluate(scene: &Scene, radio: &Radio, b: &Binary) -> Rates {
    let p = radio.power_mw();
    let n_rbs = radio.n_rbs;
    let mut cue = Vec::new();
    for c in 0..b.x.len() {
        let mut r = 0.0;
        for n in 0..n_rbs {
            if b.x[c][n] == 1 {
                let interference = received(scene, radio, b, n, Node::Bs, Own::Cue(c));
                r += rate(
                    radio,
                    p * gain(scene, radio, Node::Cue(c), Node::Bs),
                    interference,
                );
            }
        }
        cue.push(r);
    }
    let mut pair = Vec::new();
    let mut rx_interference = Vec::new();
    for d in 0..b.y.len() {
        let mut r = 0.0;
        let mut i_rx = 0.0;
        for n in 0..n_rbs {
            let at_rx = received(scene, radio, b, n, Node::Rx(d), Own::Pair(d));
            if b.y[d][n] == 1 {
                r += rate(
                    radio,
                    p * gain(scene, radio, Node::Tx(d), Node::Rx(d)),
                    at_rx,
                );
                i_rx += at_rx;
            }
            for l in 0..b.z[d].len() {
                if b.z[d][l][n] == 1 {
                    let at_relay = received(scene, radio, b, n, Node::Relay(l), Own::Pair(d));
                    let first = rate(
                        radio,
                        p * gain(scene, radio, Node::Tx(d), Node::Relay(l)),
                        at_relay,
                    );
                    let second = rate(
                        radio,
                        p * gain(scene, radio, Node::Relay(l), Node::Rx(d)),
                        at_rx,
                    );
                    r += first.min(second);
                    i_rx += at_rx;
                }
            }
        }
        pair.push(r);
        rx_interference.push(i_rx);
    }
    let sum = cue.iter().sum::<f64>() + pair.iter().sum::<f64>();
    let feasible = cue.iter().chain(&pair).all(|&r| r >= radio.threshold_bps);
    Rates {
        cue,
        pair,
        rx_interference,
        sum,
        feasible,
    }
}

/// Every valid indicator assignment, built by walking one-hot rows and
/// discarding those that break orthogonality.
pub fn all_assignments(
    n_cues: usize,
    n_pairs: usize,
    n_relays: usize,
    n_rbs: usize,
) -> Vec<Binary> {
    let pair_choices = n_rbs * (n_relays + 1);
    let mut out = Vec::new();
    let cue_total = n_rbs.pow(n_cues as u32);
    let pair_total = pair_choices.pow(n_pairs as u32);
    for cue_code in 0..cue_total {
        let mut x = vec![vec![0u8; n_rbs]; n_cues];
        let mut k = cue_code;
        for row in x.iter_mut() {
            row[k % n_rbs] = 1;
            k /= n_rbs;
        }
        for pair_code in 0..pair_total {
            let mut y = vec![vec![0u8; n_rbs]; n_pairs];
            let mut z = vec![vec![vec![0u8; n_rbs]; n_relays]; n_pairs];
            let mut k = pair_code;
            for d in 0..n_pairs {
                let choice = k % pair_choices;
                k /= pair_choices;
                let (n, mode) = (choice % n_rbs, choice / n_rbs);
                if mode == 0 {
                    y[d][n] = 1;
                } else {
                    z[d][mode - 1][n] = 1;
                }
            }
            let b = Binary { x: x.clone(), y, z };
            if b.is_valid() {
                out.push(b);
            }
        }
    }
    out
}

/// Best sum rate among feasible assignments, or among all when none is
/// feasible. Returns `(sum, feasible_found, count)`.
pub fn optimum(scene: &Scene, radio: &Radio, n_relays: usize) -> (f64, bool, usize) {
    let all = all_assignments(scene.cues.len(), scene.tx.len(), n_relays, radio.n_rbs);
    let mut best_feasible: Option<f64> = None;
    let mut best_any = f64::NEG_INFINITY;
    for b in &all {
        let r = evaluate(scene, radio, b);
        if r.feasible {
            best_feasible = Some(best_feasible.map_or(r.sum, |v| v.max(r.sum)));
        }
        best_any = best_any.max(r.sum);
    }
    match best_feasible {
        Some(v) => (v, true, all.len()),
        None => (best_any, false, all.len()),
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs())
}
