//! Order statistics over campaign results.
//!
//! Percentiles use the nearest-rank rule: the `p`-th percentile of `n`
//! sorted samples is the one at 1-based rank `max(1, ceil(p/100 * n))`.
//! The empirical CDF is the right-continuous step function
//! `F(x) = #{samples <= x} / n`.

use serde::{Deserialize, Serialize};

use super::campaign::RunReport;
use crate::error::{Error, Result};

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn rank_of(p: f64, n: usize) -> usize {
    ((p / 100.0 * n as f64).ceil() as usize).clamp(1, n)
}

/// Nearest-rank percentile, `p` in `[0, 100]`.
pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(sorted(samples)[rank_of(p, samples.len()) - 1])
}

pub fn mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            sorted: sorted(samples),
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    pub fn percentile(&self, p: f64) -> f64 {
        self.sorted[rank_of(p, self.sorted.len()) - 1]
    }

    /// `(x, F(x))` at each distinct sample.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            let y = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = y,
                _ => out.push((x, y)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boxplot {
    pub min: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub max: f64,
}

impl Boxplot {
    pub fn new(samples: &[f64]) -> Result<Self> {
        let cdf = EmpiricalCdf::new(samples)?;
        Ok(Self {
            min: cdf.sorted[0],
            p25: cdf.percentile(25.0),
            median: cdf.percentile(50.0),
            p75: cdf.percentile(75.0),
            max: *cdf.sorted.last().unwrap(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub solver: String,
    pub runs: usize,
    pub mean_sum_rate_bps: f64,
    pub median_sum_rate_bps: f64,
    /// Convergence generations, GA solvers only.
    pub convergence: Option<Boxplot>,
    /// Pooled per-pair received interference; `None` when no pairs exist.
    pub interference_p50_dbm: Option<f64>,
    pub interference_p90_dbm: Option<f64>,
    /// CDF steps `(dBm, F)` of the pooled interference.
    pub interference_cdf: Vec<(f64, f64)>,
}

/// Mean sum-rate gain of `solver` over `baseline`, in percent of the
/// baseline (lower) mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gain {
    pub solver: String,
    pub baseline: String,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub solvers: Vec<SolverSummary>,
    pub gains: Vec<Gain>,
}

impl Summary {
    pub fn solver(&self, tag: &str) -> Option<&SolverSummary> {
        self.solvers.iter().find(|s| s.solver == tag)
    }

    pub fn gain(&self, solver: &str, baseline: &str) -> Option<f64> {
        let a = self.solver(solver)?.mean_sum_rate_bps;
        let b = self.solver(baseline)?.mean_sum_rate_bps;
        Some((a / b - 1.0) * 100.0)
    }
}

/// Per-solver statistics, in order of first appearance.
pub fn summarize(reports: &[RunReport]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut order: Vec<&str> = Vec::new();
    for r in reports {
        if !order.contains(&r.solver.as_str()) {
            order.push(&r.solver);
        }
    }

    let mut solvers = Vec::with_capacity(order.len());
    for tag in &order {
        let runs: Vec<&RunReport> = reports.iter().filter(|r| r.solver == *tag).collect();
        let rates: Vec<f64> = runs.iter().map(|r| r.sum_rate_bps).collect();
        let conv: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.convergence_gen)
            .map(|g| g as f64)
            .collect();
        let interference: Vec<f64> = runs
            .iter()
            .flat_map(|r| r.interference_dbm.iter().copied())
            .collect();
        let cdf = EmpiricalCdf::new(&interference).ok();
        solvers.push(SolverSummary {
            solver: tag.to_string(),
            runs: runs.len(),
            mean_sum_rate_bps: mean(&rates)?,
            median_sum_rate_bps: percentile(&rates, 50.0)?,
            convergence: if conv.is_empty() {
                None
            } else {
                Some(Boxplot::new(&conv)?)
            },
            interference_p50_dbm: cdf.as_ref().map(|c| c.percentile(50.0)),
            interference_p90_dbm: cdf.as_ref().map(|c| c.percentile(90.0)),
            interference_cdf: cdf.map(|c| c.steps()).unwrap_or_default(),
        });
    }

    let mut gains = Vec::new();
    for i in 0..solvers.len() {
        for j in (i + 1)..solvers.len() {
            let (a, b) = (&solvers[i], &solvers[j]);
            let (hi, lo) = if a.mean_sum_rate_bps >= b.mean_sum_rate_bps {
                (a, b)
            } else {
                (b, a)
            };
            gains.push(Gain {
                solver: hi.solver.clone(),
                baseline: lo.solver.clone(),
                percent: (hi.mean_sum_rate_bps / lo.mean_sum_rate_bps - 1.0) * 100.0,
            });
        }
    }
    Ok(Summary { solvers, gains })
}
