use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ghost_outcome, ExperimentError};
use crate::district::{enumerate_maps, seats, DistrictError, Districting, Party, StateGraph, StateInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Average over the admissible maps, i.e. a uniformly random map.
    #[serde(rename = "random_map")]
    RandomMap,
    /// Gerrymander for A.
    #[serde(rename = "max_A")]
    MaxA,
    /// Gerrymander for B.
    #[serde(rename = "min_A")]
    MinA,
    /// Optimal Utility Ghost play with A moving first.
    #[serde(rename = "ghost")]
    Ghost,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::RandomMap, Condition::MaxA, Condition::MinA, Condition::Ghost];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::RandomMap => "random_map",
            Condition::MaxA => "max_A",
            Condition::MinA => "min_A",
            Condition::Ghost => "ghost",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    Std,
    ExactExpectation,
}

/// One cell of the Figure-1 table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub condition: Condition,
    pub x: usize,
    pub statistic: Statistic,
    pub value: f64,
    /// Draws behind the value; in exact mode the number of distributions.
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `trials` uniform draws per `x`; sample mean and sample std.
    Sampled { trials: usize, seed: u64 },
    /// Every distribution with `x` A counties; exact mean and population std.
    Exact,
}

/// Majority-A districts for one voter distribution under each condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawOutcome {
    pub random_map: f64,
    pub max_a: usize,
    pub min_a: usize,
    pub ghost: usize,
}

impl DrawOutcome {
    pub fn get(&self, c: Condition) -> f64 {
        match c {
            Condition::RandomMap => self.random_map,
            Condition::MaxA => self.max_a as f64,
            Condition::MinA => self.min_a as f64,
            Condition::Ghost => self.ghost as f64,
        }
    }
}

/// Every atom votes unanimously, its whole population for A where `a_atoms`
/// is set and for B elsewhere.
pub fn unanimous_votes(graph: &StateGraph, a_atoms: &[bool]) -> StateGraph {
    let votes: Vec<(u64, u64)> = graph
        .atoms()
        .iter()
        .zip(a_atoms)
        .map(|(a, &is_a)| if is_a { (a.population, 0) } else { (0, a.population) })
        .collect();
    graph.with_votes(&votes)
}

pub fn draw_outcome(maps: &[Districting], graph: &StateGraph, a_atoms: &[bool]) -> Result<DrawOutcome, ExperimentError> {
    let g = unanimous_votes(graph, a_atoms);
    let per_map: Vec<usize> = maps.iter().map(|m| seats(m, g.atoms()).seats_a).collect();
    let ghost = ghost_outcome(maps, g.atoms(), Party::A)?;
    Ok(DrawOutcome {
        random_map: per_map.iter().sum::<usize>() as f64 / per_map.len() as f64,
        max_a: *per_map.iter().max().unwrap(),
        min_a: *per_map.iter().min().unwrap(),
        ghost: ghost.seats.seats_a,
    })
}

fn mask_to_atoms(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

struct Cache<'a> {
    maps: &'a [Districting],
    graph: &'a StateGraph,
    outcomes: HashMap<u64, DrawOutcome>,
}

impl Cache<'_> {
    fn get(&mut self, mask: u64) -> Result<DrawOutcome, ExperimentError> {
        if let Some(o) = self.outcomes.get(&mask) {
            return Ok(*o);
        }
        let o = draw_outcome(self.maps, self.graph, &mask_to_atoms(mask, self.graph.len()))?;
        self.outcomes.insert(mask, o);
        Ok(o)
    }
}

/// Mean and standard deviation; `ddof` is 1 for the sample estimate.
fn mean_std(values: &[f64], ddof: usize) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() <= ddof {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - ddof as f64)).sqrt())
}

/// The votes–seats table for `x = 0..=n` A counties.
pub fn run_decomino(instance: &StateInstance, mode: Mode) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    let graph = &instance.graph;
    let n = graph.len();
    if n > 24 {
        return Err(DistrictError::TooLarge(n).into());
    }
    let maps = enumerate_maps(graph, &instance.constraints)?;
    let mut cache = Cache { maps: &maps, graph, outcomes: HashMap::new() };
    let mut records = Vec::new();
    for x in 0..=n {
        let (masks, trials, seed, stats) = match mode {
            Mode::Exact => {
                let masks: Vec<u64> = (0..1u64 << n).filter(|m| m.count_ones() as usize == x).collect();
                let len = masks.len();
                (masks, len, 0, (Statistic::ExactExpectation, 0))
            }
            Mode::Sampled { trials, seed } => {
                // One ChaCha8 stream per x, so cells do not depend on each other.
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(x as u64);
                let mut order: Vec<usize> = (0..n).collect();
                let masks = (0..trials)
                    .map(|_| {
                        order.shuffle(&mut rng);
                        order[..x].iter().fold(0u64, |m, &i| m | 1 << i)
                    })
                    .collect();
                (masks, trials, seed, (Statistic::Mean, 1))
            }
        };
        let outcomes = masks.iter().map(|&m| cache.get(m)).collect::<Result<Vec<_>, _>>()?;
        for c in Condition::ALL {
            let values: Vec<f64> = outcomes.iter().map(|o| o.get(c)).collect();
            let (mean, std) = mean_std(&values, stats.1);
            records.push(ExperimentRecord { condition: c, x, statistic: stats.0, value: mean, trials, seed });
            records.push(ExperimentRecord { condition: c, x, statistic: Statistic::Std, value: std, trials, seed });
        }
    }
    Ok(records)
}

pub fn lookup(records: &[ExperimentRecord], condition: Condition, x: usize, statistic: Statistic) -> Option<f64> {
    records
        .iter()
        .find(|r| r.condition == condition && r.x == x && r.statistic == statistic)
        .map(|r| r.value)
}

/// Cells where the sampled mean strays more than `4·σ/√trials` from the
/// exact expectation, σ being the exact population std of the cell.
pub fn check_sampled(sampled: &[ExperimentRecord], exact: &[ExperimentRecord]) -> Vec<String> {
    let mut failures = Vec::new();
    for r in sampled.iter().filter(|r| r.statistic == Statistic::Mean) {
        let (Some(mu), Some(sigma)) = (
            lookup(exact, r.condition, r.x, Statistic::ExactExpectation),
            lookup(exact, r.condition, r.x, Statistic::Std),
        ) else {
            failures.push(format!("{} x={}: no exact cell", r.condition, r.x));
            continue;
        };
        let tol = 4.0 * sigma / (r.trials as f64).sqrt();
        if (r.value - mu).abs() > tol + 1e-12 {
            failures.push(format!("{} x={}: sampled {:.4} vs exact {:.4} (tolerance {:.4})", r.condition, r.x, r.value, mu, tol));
        }
    }
    failures
}

pub fn write_records<W: std::io::Write>(records: &[ExperimentRecord], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| ExperimentError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| ExperimentError::Io(e.to_string()))
}
