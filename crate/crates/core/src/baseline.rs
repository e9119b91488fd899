//! Reference solvers: the greedy D2D-first heuristic, the random baseline
//! and an exhaustive oracle for small instances.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::{evaluate, pair_rate_in, Allocation, Mode, PartialAllocation, RateReport};
use crate::channel::{Position, RadioParams, Topology};
use crate::error::{Error, Result};
use crate::ga::GeneLayout;

/// Relays a pair may consider when a solver picks its best relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelayCandidates {
    #[default]
    All,
    /// The `k` relays closest to the pair midpoint.
    Nearest { k: usize },
}

impl RelayCandidates {
    pub fn for_pair(&self, topo: &Topology, d: usize) -> Vec<usize> {
        let all = 0..topo.n_relays();
        match *self {
            RelayCandidates::All => all.collect(),
            RelayCandidates::Nearest { k } => {
                let tx = topo.position(topo.tx(d));
                let rx = topo.position(topo.rx(d));
                let mid = Position::new((tx.x + rx.x) / 2.0, (tx.y + rx.y) / 2.0);
                let mut by_distance: Vec<(f64, usize)> = all
                    .map(|l| (topo.position(topo.relay(l)).distance(&mid), l))
                    .collect();
                by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut chosen: Vec<usize> =
                    by_distance.into_iter().take(k).map(|(_, l)| l).collect();
                chosen.sort_unstable();
                chosen
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BaselineOutcome {
    pub allocation: Allocation,
    pub report: RateReport,
}

/// `n_cues` distinct RBs drawn uniformly; CUE `c` gets the `c`-th draw.
pub fn random_orthogonal_cues<R: Rng + ?Sized>(
    n_rbs: usize,
    n_cues: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n_cues > n_rbs {
        return Err(Error::config(
            "n_rbs",
            format!("{n_rbs} RBs cannot host {n_cues} orthogonal CUEs"),
        ));
    }
    Ok(index::sample(rng, n_rbs, n_cues).into_vec())
}

/// Best relayed rate of pair `d` on `rb` over `candidates`; lowest relay
/// index wins ties. `None` when there is no candidate.
fn best_relay<O: crate::allocation::Occupancy>(
    occ: &O,
    topo: &Topology,
    params: &RadioParams,
    d: usize,
    rb: usize,
    candidates: &[usize],
) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for &l in candidates {
        let rate = pair_rate_in(occ, topo, params, d, rb, Mode::Relayed(l)).rate;
        if best.is_none_or(|(r, _)| rate > r) {
            best = Some((rate, l));
        }
    }
    best
}

/// Potential direct and best-relay rates of every pair on every RB.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrices {
    n_rbs: usize,
    direct: Vec<f64>,
    relayed: Vec<f64>,
    relay_choice: Vec<Option<usize>>,
    row_max_direct: Vec<(f64, usize)>,
    row_max_relayed: Vec<(f64, usize)>,
}

impl RateMatrices {
    pub fn direct(&self, pair: usize, rb: usize) -> f64 {
        self.direct[pair * self.n_rbs + rb]
    }

    pub fn relayed(&self, pair: usize, rb: usize) -> f64 {
        self.relayed[pair * self.n_rbs + rb]
    }

    pub fn relay_choice(&self, pair: usize, rb: usize) -> Option<usize> {
        self.relay_choice[pair * self.n_rbs + rb]
    }

    /// `(max rate, arg RB)` of the direct row.
    pub fn row_max_direct(&self, pair: usize) -> (f64, usize) {
        self.row_max_direct[pair]
    }

    pub fn row_max_relayed(&self, pair: usize) -> (f64, usize) {
        self.row_max_relayed[pair]
    }

    fn refresh_row_max(&mut self, pair: usize) {
        let row = pair * self.n_rbs..(pair + 1) * self.n_rbs;
        self.row_max_direct[pair] = argmax(&self.direct[row.clone()]);
        self.row_max_relayed[pair] = argmax(&self.relayed[row]);
    }

    fn zero_row(&mut self, pair: usize) {
        let row = pair * self.n_rbs..(pair + 1) * self.n_rbs;
        self.direct[row.clone()].fill(0.0);
        self.relayed[row.clone()].fill(0.0);
        self.relay_choice[row].fill(None);
        self.row_max_direct[pair] = (0.0, 0);
        self.row_max_relayed[pair] = (0.0, 0);
    }
}

/// Maximum with the lowest index on ties.
fn argmax(row: &[f64]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (n, &v) in row.iter().enumerate() {
        if v > best.0 {
            best = (v, n);
        }
    }
    if row.is_empty() {
        (0.0, 0)
    } else {
        best
    }
}

/// One greedy commitment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commit {
    pub pair: usize,
    pub rb: usize,
    pub mode: Mode,
    /// Potential rate at commit time.
    pub rate: f64,
}

/// Step-wise driver of the D2D-first greedy heuristic.
///
/// CUEs are fixed up front. Each step commits the globally best
/// `(pair, RB, mode)` among unassigned pairs, then refreshes the affected RB
/// column for every remaining pair.
pub struct GreedyAllocator<'a> {
    topo: &'a Topology,
    params: &'a RadioParams,
    candidates: Vec<Vec<usize>>,
    partial: PartialAllocation,
    matrices: RateMatrices,
    assigned: Vec<bool>,
}

impl<'a> GreedyAllocator<'a> {
    pub fn new(
        topo: &'a Topology,
        params: &'a RadioParams,
        cue_rb: Vec<usize>,
        relay_candidates: RelayCandidates,
    ) -> Result<Self> {
        let n_rbs = params.n_rbs;
        let n_pairs = topo.n_pairs();
        let partial = PartialAllocation::new(cue_rb, n_rbs, n_pairs);
        let candidates = (0..n_pairs)
            .map(|d| relay_candidates.for_pair(topo, d))
            .collect();
        let mut this = Self {
            topo,
            params,
            candidates,
            partial,
            matrices: RateMatrices {
                n_rbs,
                direct: vec![0.0; n_pairs * n_rbs],
                relayed: vec![0.0; n_pairs * n_rbs],
                relay_choice: vec![None; n_pairs * n_rbs],
                row_max_direct: vec![(0.0, 0); n_pairs],
                row_max_relayed: vec![(0.0, 0); n_pairs],
            },
            assigned: vec![false; n_pairs],
        };
        for d in 0..n_pairs {
            for n in 0..n_rbs {
                this.fill_entry(d, n);
            }
            this.matrices.refresh_row_max(d);
        }
        Ok(this)
    }

    pub fn matrices(&self) -> &RateMatrices {
        &self.matrices
    }

    pub fn partial(&self) -> &PartialAllocation {
        &self.partial
    }

    pub fn is_assigned(&self, pair: usize) -> bool {
        self.assigned[pair]
    }

    /// Direct rate and best relayed rate `(rate, relay)` of `pair` on `rb`
    /// under the current partial allocation, computed from scratch.
    pub fn potential(&self, pair: usize, rb: usize) -> (f64, Option<(f64, usize)>) {
        let direct = pair_rate_in(
            &self.partial,
            self.topo,
            self.params,
            pair,
            rb,
            Mode::Direct,
        )
        .rate;
        let relayed = best_relay(
            &self.partial,
            self.topo,
            self.params,
            pair,
            rb,
            &self.candidates[pair],
        );
        (direct, relayed)
    }

    fn fill_entry(&mut self, pair: usize, rb: usize) {
        let (direct, relayed) = self.potential(pair, rb);
        let at = pair * self.matrices.n_rbs + rb;
        self.matrices.direct[at] = direct;
        self.matrices.relayed[at] = relayed.map_or(0.0, |r| r.0);
        self.matrices.relay_choice[at] = relayed.map(|r| r.1);
    }

    /// Commits the best remaining `(pair, RB, mode)`. Ties go to the lowest
    /// pair, then the lowest RB, then direct mode.
    pub fn step(&mut self) -> Option<Commit> {
        let mut best: Option<(f64, usize, usize, bool)> = None;
        for d in (0..self.assigned.len()).filter(|&d| !self.assigned[d]) {
            let (dr, dn) = self.matrices.row_max_direct(d);
            let (rr, rn) = self.matrices.row_max_relayed(d);
            let mut options = vec![(dr, d, dn, false)];
            if self.matrices.relay_choice(d, rn).is_some() {
                options.push((rr, d, rn, true));
            }
            for cand in options {
                let better = match best {
                    None => true,
                    Some(b) => {
                        cand.0 > b.0
                            || (cand.0 == b.0 && (cand.1, cand.2, cand.3) < (b.1, b.2, b.3))
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (rate, pair, rb, relayed) = best?;
        let mode = if relayed {
            Mode::Relayed(
                self.matrices
                    .relay_choice(pair, rb)
                    .expect("relay entry without choice"),
            )
        } else {
            Mode::Direct
        };

        self.partial.assign(pair, rb, mode);
        self.assigned[pair] = true;
        self.matrices.zero_row(pair);
        for u in 0..self.assigned.len() {
            if !self.assigned[u] {
                self.fill_entry(u, rb);
                self.matrices.refresh_row_max(u);
            }
        }
        Some(Commit {
            pair,
            rb,
            mode,
            rate,
        })
    }

    /// Runs the remaining steps and scores the final allocation.
    pub fn finish(mut self) -> Result<BaselineOutcome> {
        while self.step().is_some() {}
        let allocation = self.partial.complete()?;
        let report = evaluate(&allocation, self.topo, self.params)?;
        Ok(BaselineOutcome { allocation, report })
    }
}

pub fn run_heuristic<R: Rng + ?Sized>(
    topo: &Topology,
    params: &RadioParams,
    relay_candidates: RelayCandidates,
    rng: &mut R,
) -> Result<BaselineOutcome> {
    let cue_rb = random_orthogonal_cues(params.n_rbs, topo.n_cues(), rng)?;
    GreedyAllocator::new(topo, params, cue_rb, relay_candidates)?.finish()
}

/// Random RBs for everyone; each pair, in index order, takes whichever of
/// direct or best-relay mode is faster given the pairs placed before it.
pub fn run_random<R: Rng + ?Sized>(
    topo: &Topology,
    params: &RadioParams,
    relay_candidates: RelayCandidates,
    rng: &mut R,
) -> Result<BaselineOutcome> {
    let cue_rb = random_orthogonal_cues(params.n_rbs, topo.n_cues(), rng)?;
    let mut partial = PartialAllocation::new(cue_rb, params.n_rbs, topo.n_pairs());
    for d in 0..topo.n_pairs() {
        let rb = rng.gen_range(0..params.n_rbs);
        let direct = pair_rate_in(&partial, topo, params, d, rb, Mode::Direct).rate;
        let candidates = relay_candidates.for_pair(topo, d);
        let mode = match best_relay(&partial, topo, params, d, rb, &candidates) {
            Some((rate, l)) if rate > direct => Mode::Relayed(l),
            _ => Mode::Direct,
        };
        partial.assign(d, rb, mode);
    }
    let allocation = partial.complete()?;
    let report = evaluate(&allocation, topo, params)?;
    Ok(BaselineOutcome { allocation, report })
}

/// Default cap on the number of allocations the oracle will enumerate.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 10_000_000;

/// `N!/(N-C)! * (N (L+1))^D`, saturating.
pub fn search_space_size(n_rbs: usize, n_cues: usize, n_pairs: usize, n_relays: usize) -> u128 {
    if n_cues > n_rbs {
        return 0;
    }
    let mut size: u128 = 1;
    for k in 0..n_cues {
        size = size.saturating_mul((n_rbs - k) as u128);
    }
    let per_pair = (n_rbs as u128).saturating_mul(n_relays as u128 + 1);
    for _ in 0..n_pairs {
        size = size.saturating_mul(per_pair);
    }
    size
}

/// Every structurally valid gene vector in lexicographic order.
pub struct AllocationSpace {
    layout: GeneLayout,
    current: Option<Vec<usize>>,
}

impl AllocationSpace {
    pub fn new(layout: GeneLayout) -> Self {
        let current = (layout.n_cues <= layout.n_rbs && (layout.n_pairs == 0 || layout.n_rbs > 0))
            .then(|| {
                let mut genes: Vec<usize> = (0..layout.n_cues).collect();
                genes.resize(layout.len(), 0);
                genes
            });
        Self { layout, current }
    }

    /// Advances the due section as a mixed-radix counter; false on overflow.
    fn advance_pairs(&self, genes: &mut [usize]) -> bool {
        for i in (self.layout.n_cues..self.layout.len()).rev() {
            genes[i] += 1;
            if genes[i] < self.layout.range(i) {
                return true;
            }
            genes[i] = 0;
        }
        false
    }

    /// Next injective CUE tuple in lexicographic order; false when exhausted.
    fn advance_cues(&self, genes: &mut [usize]) -> bool {
        let c = self.layout.n_cues;
        let n = self.layout.n_rbs;
        for i in (0..c).rev() {
            let used = |v: usize, genes: &[usize]| genes[..i].contains(&v);
            let next = (genes[i] + 1..n).find(|&v| !used(v, genes));
            if let Some(v) = next {
                genes[i] = v;
                let mut fill = 0;
                for j in i + 1..c {
                    while genes[..j].contains(&fill) {
                        fill += 1;
                    }
                    genes[j] = fill;
                    fill += 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for AllocationSpace {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut genes = out.clone();
        let more = self.advance_pairs(&mut genes) || self.advance_cues(&mut genes);
        self.current = more.then_some(genes);
        Some(out)
    }
}

#[derive(Debug, Clone)]
pub struct ExhaustiveOutcome {
    pub allocation: Allocation,
    pub report: RateReport,
    /// Whether any allocation met every rate threshold.
    pub feasible_found: bool,
    pub explored: u128,
}

/// Enumerates every allocation and returns the best feasible one by sum
/// rate, or the best overall when none is feasible. Ties keep the
/// lexicographically smallest gene vector.
pub fn run_exhaustive(
    topo: &Topology,
    params: &RadioParams,
    cap: u128,
) -> Result<ExhaustiveOutcome> {
    params.validate(topo.n_cues())?;
    let size = search_space_size(params.n_rbs, topo.n_cues(), topo.n_pairs(), topo.n_relays());
    if size > cap {
        return Err(Error::SearchSpaceTooLarge {
            size,
            cap,
            n_rbs: params.n_rbs,
            n_cues: topo.n_cues(),
            n_pairs: topo.n_pairs(),
            n_relays: topo.n_relays(),
        });
    }
    let layout = GeneLayout::new(topo, params);
    let mut best_feasible: Option<(Allocation, RateReport)> = None;
    let mut best_any: Option<(Allocation, RateReport)> = None;
    let mut explored = 0u128;
    for genes in AllocationSpace::new(layout) {
        explored += 1;
        let alloc = layout.decode(&genes);
        let report = evaluate(&alloc, topo, params)?;
        if report.feasible()
            && best_feasible
                .as_ref()
                .is_none_or(|b| report.sum_rate > b.1.sum_rate)
        {
            best_feasible = Some((alloc.clone(), report.clone()));
        }
        if best_any
            .as_ref()
            .is_none_or(|b| report.sum_rate > b.1.sum_rate)
        {
            best_any = Some((alloc, report));
        }
    }
    let feasible_found = best_feasible.is_some();
    let (allocation, report) = best_feasible
        .or(best_any)
        .ok_or_else(|| Error::Structural("empty allocation space".into()))?;
    Ok(ExhaustiveOutcome {
        allocation,
        report,
        feasible_found,
        explored,
    })
}
