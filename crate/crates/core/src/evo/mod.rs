//! Genetic algorithms: a single-objective elitist GA, NSGA-II, the Pareto
//! machinery they share, and the ZDT test problems.

mod ga;
mod nsga2;
pub mod operators;
mod pareto;
pub mod zdt;

pub use ga::{ga_minimize, GaResult};
pub use nsga2::{nsga2, GenerationMetrics, Nsga2Result};
pub use pareto::{
    crowding_distance, dominates, hypervolume_2d, non_dominated_sort, ParetoArchive, DEFAULT_DEDUP_TOLERANCE,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-coordinate `[lo, hi]` box.
pub type Bounds = Vec<(f64, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Hyperparameters shared by both engines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub max_generations: usize,
    pub seed: u64,
    /// Probability that a selected pair is recombined.
    pub crossover_rate: f64,
    /// Probability that SBX touches a given gene of a recombined pair.
    pub crossover_gene_rate: f64,
    /// Per-gene mutation probability; `None` means `1/d`.
    pub mutation_rate: Option<f64>,
    /// SBX distribution index.
    pub crossover_eta: f64,
    /// Polynomial-mutation distribution index; smaller values mutate further.
    pub mutation_eta: f64,
    /// Fraction of the population carried over unchanged (single-objective GA).
    pub elitism_fraction: f64,
    /// Stop as soon as the best value reaches this threshold (single-objective GA).
    pub early_stop: Option<f64>,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            max_generations: 500,
            seed: 0,
            crossover_rate: 0.9,
            crossover_gene_rate: 0.5,
            mutation_rate: None,
            crossover_eta: 15.0,
            mutation_eta: 20.0,
            elitism_fraction: 0.05,
            early_stop: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return Err(Error::Configuration(format!(
                "population must be even and at least 4, got {}",
                self.population
            )));
        }
        let rate_ok = |r: f64| (0.0..=1.0).contains(&r);
        if !rate_ok(self.crossover_rate)
            || !rate_ok(self.crossover_gene_rate)
            || !self.mutation_rate.is_none_or(rate_ok)
            || !rate_ok(self.elitism_fraction)
        {
            return Err(Error::Configuration("rates must lie in [0, 1]".into()));
        }
        if !(self.crossover_eta >= 0.0 && self.mutation_eta >= 0.0) {
            return Err(Error::Configuration("distribution indices must be non-negative".into()));
        }
        Ok(())
    }

    pub(crate) fn mutation_rate_for(&self, d: usize) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / d.max(1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub objectives: Vec<f64>,
    pub rank: usize,
    /// Infinite for boundary members, stored as `null` in JSON.
    #[serde(with = "crowding_serde")]
    pub crowding: f64,
}

mod crowding_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl Individual {
    pub fn new(genome: Vec<f64>, objectives: Vec<f64>) -> Self {
        Self { genome, objectives, rank: 0, crowding: 0.0 }
    }
}

pub(crate) fn check_bounds(bounds: &Bounds) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::Configuration("empty design space".into()));
    }
    if bounds.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(Error::Configuration("bounds must be finite with lo <= hi".into()));
    }
    Ok(())
}

/// Evaluate genomes concurrently; results come back in input order so the
/// run does not depend on scheduling.
pub(crate) fn evaluate_all<T, F>(genomes: &[Vec<f64>], f: &F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    genomes.par_iter().map(|g| f(g)).collect()
}
