//! Genetic algorithm over integer chromosomes.
//!
//! A chromosome is laid out as `[CUE RBs (C) | pair RBs (D) | pair modes (D)]`.
//! A mode gene of `0` means direct, `k > 0` means relay `k - 1`. Fitness is
//! the sum rate minus a weighted shortfall penalty for every link below the
//! rate threshold. Parents are drawn by roulette wheel and the next
//! generation keeps the best `elite_count` parents plus the best offspring.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::{evaluate, Allocation, Mode, RateReport};
use crate::channel::{RadioParams, Topology};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverKind {
    OnePoint,
    TwoPoint,
}

/// How the threshold penalty is signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltySign {
    /// `alpha * min(R - R_th, 0)`: only links below the threshold lose fitness.
    #[default]
    Shortfall,
    /// `alpha * min(R_th - R, 0)`: links above the threshold lose fitness.
    /// Kept for comparison only; it rewards infeasibility.
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    /// Stop after this many generations without improvement.
    pub stall_window: usize,
    pub crossover_kind: CrossoverKind,
    pub crossover_prob: f64,
    /// Per-gene mutation probability.
    pub mutation_prob: f64,
    pub elite_count: usize,
    /// Penalty multiplier on CUE shortfall (bit/s per bit/s).
    pub penalty_cue: f64,
    /// Penalty multiplier on pair shortfall.
    pub penalty_due: f64,
    pub penalty_sign: PenaltySign,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            max_generations: 3000,
            stall_window: 100,
            crossover_kind: CrossoverKind::TwoPoint,
            crossover_prob: 0.9,
            mutation_prob: 0.005,
            elite_count: 10,
            penalty_cue: 2.0,
            penalty_due: 2.0,
            penalty_sign: PenaltySign::Shortfall,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("ga.population_size", "must be at least 2"));
        }
        if self.max_generations == 0 {
            return Err(Error::config("ga.max_generations", "must be at least 1"));
        }
        if self.stall_window == 0 {
            return Err(Error::config("ga.stall_window", "must be at least 1"));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::config(
                "ga.elite_count",
                "must be below population_size",
            ));
        }
        for (field, p) in [
            ("ga.crossover_prob", self.crossover_prob),
            ("ga.mutation_prob", self.mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(field, format!("{p} is not a probability")));
            }
        }
        for (field, a) in [
            ("ga.penalty_cue", self.penalty_cue),
            ("ga.penalty_due", self.penalty_due),
        ] {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::config(field, "must be non-negative and finite"));
            }
        }
        Ok(())
    }
}

/// Shape of a chromosome for a given instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneLayout {
    pub n_cues: usize,
    pub n_pairs: usize,
    pub n_rbs: usize,
    pub n_relays: usize,
}

impl GeneLayout {
    pub fn new(topo: &Topology, params: &RadioParams) -> Self {
        Self {
            n_cues: topo.n_cues(),
            n_pairs: topo.n_pairs(),
            n_rbs: params.n_rbs,
            n_relays: topo.n_relays(),
        }
    }

    pub fn len(&self) -> usize {
        self.n_cues + 2 * self.n_pairs
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of legal values of gene `i`.
    pub fn range(&self, i: usize) -> usize {
        if i < self.n_cues + self.n_pairs {
            self.n_rbs
        } else {
            self.n_relays + 1
        }
    }

    pub fn decode(&self, genes: &[usize]) -> Allocation {
        let (cue, rest) = genes.split_at(self.n_cues);
        let (rb, mode) = rest.split_at(self.n_pairs);
        Allocation {
            cue_rb: cue.to_vec(),
            due_rb: rb.to_vec(),
            due_mode: mode
                .iter()
                .map(|&m| {
                    if m == 0 {
                        Mode::Direct
                    } else {
                        Mode::Relayed(m - 1)
                    }
                })
                .collect(),
        }
    }

    pub fn encode(&self, alloc: &Allocation) -> Vec<usize> {
        let mut genes = Vec::with_capacity(self.len());
        genes.extend_from_slice(&alloc.cue_rb);
        genes.extend_from_slice(&alloc.due_rb);
        genes.extend(alloc.due_mode.iter().map(|m| match *m {
            Mode::Direct => 0,
            Mode::Relayed(l) => l + 1,
        }));
        genes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<usize>,
    pub fitness: f64,
}

/// Sum rate plus the configured threshold penalty.
pub fn penalized_fitness(report: &RateReport, params: &RadioParams, cfg: &GaConfig) -> f64 {
    let th = params.rate_threshold_bps;
    let term = |rate: f64| match cfg.penalty_sign {
        PenaltySign::Shortfall => (rate - th).min(0.0),
        PenaltySign::Inverted => (th - rate).min(0.0),
    };
    let cue: f64 = report.cue_rates.iter().map(|&r| term(r)).sum();
    let due: f64 = report.due_rates.iter().map(|&r| term(r)).sum();
    report.sum_rate + cfg.penalty_cue * cue + cfg.penalty_due * due
}

/// Fitness of a gene vector; fails on structurally invalid genes.
pub fn fitness(
    genes: &[usize],
    topo: &Topology,
    params: &RadioParams,
    cfg: &GaConfig,
) -> Result<f64> {
    let layout = GeneLayout::new(topo, params);
    let report = evaluate(&layout.decode(genes), topo, params)?;
    Ok(penalized_fitness(&report, params, cfg))
}

/// Fitness-proportionate sampler over a fixed set of weights.
#[derive(Debug, Clone)]
pub struct RouletteWheel {
    cumulative: Vec<f64>,
}

/// Relative offset added after shifting so the worst individual keeps a
/// non-zero share of the wheel.
pub const SHIFT_EPSILON: f64 = 1e-6;

impl RouletteWheel {
    /// Wheel over non-negative weights. A zero or non-finite total falls
    /// back to uniform.
    pub fn from_weights(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|&w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        if !acc.is_finite() || acc <= 0.0 {
            cumulative = (1..=weights.len()).map(|i| i as f64).collect();
        }
        Self { cumulative }
    }

    /// Wheel over raw fitness values, shifted by `-min + eps * |max|` so that
    /// negative (penalized) fitness still yields valid probabilities.
    pub fn from_fitness(fitness: &[f64]) -> Self {
        let min = fitness.iter().copied().fold(f64::INFINITY, f64::min);
        let max = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let offset = -min + SHIFT_EPSILON * max.abs();
        let shifted: Vec<f64> = fitness.iter().map(|&f| f + offset).collect();
        Self::from_weights(&shifted)
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.cumulative.last().copied().unwrap_or(0.0);
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = (c - prev) / total;
                prev = c;
                p
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("empty roulette wheel");
        let x = rng.gen::<f64>() * total;
        // First slot whose cumulative weight exceeds x; zero-width slots are skipped.
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

/// Draws one parent by roulette wheel over the population's fitness.
pub fn select_parent<'a, R: Rng + ?Sized>(
    population: &'a [Individual],
    rng: &mut R,
) -> &'a Individual {
    let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
    &population[RouletteWheel::from_fitness(&fitness).sample(rng)]
}

/// Exchanges the tail starting at `cut`.
pub fn one_point_at(a: &[usize], b: &[usize], cut: usize) -> (Vec<usize>, Vec<usize>) {
    let mut c1 = a[..cut].to_vec();
    c1.extend_from_slice(&b[cut..]);
    let mut c2 = b[..cut].to_vec();
    c2.extend_from_slice(&a[cut..]);
    (c1, c2)
}

/// Exchanges the segment `[start, end)`.
pub fn two_point_at(
    a: &[usize],
    b: &[usize],
    start: usize,
    end: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    c1[start..end].copy_from_slice(&b[start..end]);
    c2[start..end].copy_from_slice(&a[start..end]);
    (c1, c2)
}

pub fn crossover<R: Rng + ?Sized>(
    a: &[usize],
    b: &[usize],
    cfg: &GaConfig,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    assert_eq!(
        a.len(),
        b.len(),
        "crossover on chromosomes of different length"
    );
    let len = a.len();
    if len < 2 || !rng.gen_bool(cfg.crossover_prob) {
        return (a.to_vec(), b.to_vec());
    }
    match cfg.crossover_kind {
        CrossoverKind::OnePoint => one_point_at(a, b, rng.gen_range(1..len)),
        CrossoverKind::TwoPoint => {
            let cuts = index::sample(rng, len + 1, 2);
            let (i, j) = (cuts.index(0), cuts.index(1));
            two_point_at(a, b, i.min(j), i.max(j))
        }
    }
}

/// Replaces each gene with probability `mutation_prob` by a different legal
/// value. Genes whose range has a single value never change.
pub fn mutate<R: Rng + ?Sized>(
    genes: &mut [usize],
    layout: &GeneLayout,
    mutation_prob: f64,
    rng: &mut R,
) {
    if mutation_prob <= 0.0 {
        return;
    }
    for (i, g) in genes.iter_mut().enumerate() {
        let range = layout.range(i);
        if range < 2 || !rng.gen_bool(mutation_prob) {
            continue;
        }
        let v = rng.gen_range(0..range - 1);
        *g = if v >= *g { v + 1 } else { v };
    }
}

/// Restores CUE orthogonality: the first CUE on an RB keeps it, later
/// duplicates move to uniformly chosen unused RBs.
pub fn repair<R: Rng + ?Sized>(genes: &mut [usize], layout: &GeneLayout, rng: &mut R) {
    let cues = &mut genes[..layout.n_cues];
    let mut taken = vec![false; layout.n_rbs];
    let mut duplicates = Vec::new();
    for (c, &rb) in cues.iter().enumerate() {
        if std::mem::replace(&mut taken[rb], true) {
            duplicates.push(c);
        }
    }
    if duplicates.is_empty() {
        return;
    }
    let mut free: Vec<usize> = (0..layout.n_rbs).filter(|&rb| !taken[rb]).collect();
    for c in duplicates {
        let k = rng.gen_range(0..free.len());
        cues[c] = free.remove(k);
    }
}

/// Random feasible chromosome: distinct CUE RBs, uniform pair RBs and modes.
pub fn random_genes<R: Rng + ?Sized>(layout: &GeneLayout, rng: &mut R) -> Vec<usize> {
    let mut genes = Vec::with_capacity(layout.len());
    genes.extend(index::sample(rng, layout.n_rbs, layout.n_cues));
    genes.extend((0..layout.n_pairs).map(|_| rng.gen_range(0..layout.n_rbs)));
    genes.extend((0..layout.n_pairs).map(|_| rng.gen_range(0..=layout.n_relays)));
    genes
}

pub fn init_population<R: Rng + ?Sized>(
    topo: &Topology,
    params: &RadioParams,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    cfg.validate()?;
    params.validate(topo.n_cues())?;
    let layout = GeneLayout::new(topo, params);
    (0..cfg.population_size)
        .map(|_| {
            let genes = random_genes(&layout, rng);
            let fitness = fitness(&genes, topo, params, cfg)?;
            Ok(Individual { genes, fitness })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    /// Best population fitness, one entry per generation starting at generation 1
    /// (the initial population).
    pub best_fitness_per_generation: Vec<f64>,
    /// First generation (1-based) whose best fitness equals the final best.
    pub generation_of_convergence: usize,
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: Individual,
    pub allocation: Allocation,
    pub report: RateReport,
    pub trace: ConvergenceTrace,
}

pub fn run_ga<R: Rng + ?Sized>(
    topo: &Topology,
    params: &RadioParams,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<GaOutcome> {
    let population = init_population(topo, params, cfg, rng)?;
    evolve(population, topo, params, cfg, rng)
}

fn sort_desc(pop: &mut [Individual]) {
    pop.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
}

/// Runs the generational loop from a given initial population.
pub fn evolve<R: Rng + ?Sized>(
    mut population: Vec<Individual>,
    topo: &Topology,
    params: &RadioParams,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<GaOutcome> {
    cfg.validate()?;
    if population.len() != cfg.population_size {
        return Err(Error::config(
            "ga.population_size",
            format!("initial population has {} individuals", population.len()),
        ));
    }
    let layout = GeneLayout::new(topo, params);
    let m = cfg.population_size;

    sort_desc(&mut population);
    let mut best = population[0].clone();
    let mut trace = vec![best.fitness];
    let mut last_improvement = 1;

    for generation in 2..=cfg.max_generations {
        if generation - last_improvement > cfg.stall_window {
            break;
        }
        let fitness_values: Vec<f64> = population.iter().map(|i| i.fitness).collect();
        let wheel = RouletteWheel::from_fitness(&fitness_values);

        let mut children: Vec<Vec<usize>> = Vec::with_capacity(m + 1);
        while children.len() < m {
            let a = &population[wheel.sample(rng)].genes;
            let b = &population[wheel.sample(rng)].genes;
            let (mut c1, mut c2) = crossover(a, b, cfg, rng);
            for child in [&mut c1, &mut c2] {
                mutate(child, &layout, cfg.mutation_prob, rng);
                repair(child, &layout, rng);
            }
            children.push(c1);
            children.push(c2);
        }
        children.truncate(m);

        let mut offspring = children
            .into_iter()
            .map(|genes| {
                let fitness = fitness(&genes, topo, params, cfg)?;
                Ok(Individual { genes, fitness })
            })
            .collect::<Result<Vec<_>>>()?;
        sort_desc(&mut offspring);

        population.truncate(cfg.elite_count);
        population.extend(offspring.into_iter().take(m - cfg.elite_count));
        sort_desc(&mut population);

        trace.push(population[0].fitness);
        if population[0].fitness > best.fitness {
            best = population[0].clone();
            last_improvement = generation;
        }
    }

    let generation_of_convergence = trace
        .iter()
        .position(|&f| f == best.fitness)
        .map_or(trace.len(), |i| i + 1);
    let allocation = layout.decode(&best.genes);
    let report = evaluate(&allocation, topo, params)?;
    Ok(GaOutcome {
        best,
        allocation,
        report,
        trace: ConvergenceTrace {
            best_fitness_per_generation: trace,
            generation_of_convergence,
        },
    })
}
