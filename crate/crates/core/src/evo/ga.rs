use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{clip, polynomial_mutation, sbx_crossover, uniform_genome};
use super::{check_bounds, evaluate_all, Bounds, GaConfig, Individual};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct GaResult {
    /// Best individual found; `objectives` holds the single value.
    pub best: Individual,
    /// Best-so-far value after the initial population (index 0) and after
    /// each generation.
    pub trace: Vec<f64>,
    /// Final population, best first.
    pub population: Vec<Individual>,
}

impl GaResult {
    pub fn generations(&self) -> usize {
        self.trace.len() - 1
    }
}

fn fitness(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn by_fitness(pop: &[(Vec<f64>, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| pop[a].1.partial_cmp(&pop[b].1).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    order
}

/// Minimize `f` over the box `bounds` with an elitist real-coded GA.
///
/// `seeds` are placed in the initial population (clipped to the box); the
/// rest is sampled uniformly. Each generation keeps the best
/// `elitism_fraction` of the population and fills the remainder with
/// tournament-selected, SBX-recombined, polynomially mutated children.
pub fn ga_minimize<F>(f: F, bounds: &Bounds, cfg: &GaConfig, seeds: &[Vec<f64>]) -> Result<GaResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    check_bounds(bounds)?;
    let n = cfg.population;
    let d = bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut genomes: Vec<Vec<f64>> = seeds
        .iter()
        .take(n)
        .map(|s| {
            let mut g = s.clone();
            g.resize(d, 0.0);
            clip(&mut g, bounds);
            g
        })
        .collect();
    while genomes.len() < n {
        genomes.push(uniform_genome(&mut rng, bounds));
    }
    let values = evaluate_all(&genomes, &|g: &[f64]| fitness(f(g)));
    let mut pop: Vec<(Vec<f64>, f64)> = genomes.into_iter().zip(values).collect();

    let mut order = by_fitness(&pop);
    let mut trace = vec![pop[order[0]].1];
    let reached = |v: f64| cfg.early_stop.is_some_and(|t| v <= t);
    let elites = ((cfg.elitism_fraction * n as f64).round() as usize).clamp(1, n);
    let rate = cfg.mutation_rate_for(d);

    let mut generation = 0;
    while generation < cfg.max_generations && !reached(trace[generation]) {
        generation += 1;
        let tournament = |rng: &mut ChaCha8Rng| {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if pop[a].1 < pop[b].1 || (pop[a].1 == pop[b].1 && a < b) {
                a
            } else {
                b
            }
        };
        let mut children = Vec::with_capacity(n - elites);
        while children.len() < n - elites {
            let p1 = tournament(&mut rng);
            let p2 = tournament(&mut rng);
            let (mut c1, mut c2) = if rng.gen::<f64>() < cfg.crossover_rate {
                sbx_crossover(&mut rng, &pop[p1].0, &pop[p2].0, bounds, cfg.crossover_eta, cfg.crossover_gene_rate)
            } else {
                (pop[p1].0.clone(), pop[p2].0.clone())
            };
            polynomial_mutation(&mut rng, &mut c1, bounds, rate, cfg.mutation_eta);
            polynomial_mutation(&mut rng, &mut c2, bounds, rate, cfg.mutation_eta);
            children.push(c1);
            if children.len() < n - elites {
                children.push(c2);
            }
        }
        let values = evaluate_all(&children, &|g: &[f64]| fitness(f(g)));
        let mut next: Vec<(Vec<f64>, f64)> = order[..elites].iter().map(|&i| pop[i].clone()).collect();
        next.extend(children.into_iter().zip(values));
        pop = next;
        order = by_fitness(&pop);
        let best = pop[order[0]].1.min(trace[generation - 1]);
        trace.push(best);
    }

    let population: Vec<Individual> =
        order.iter().map(|&i| Individual::new(pop[i].0.clone(), vec![pop[i].1])).collect();
    Ok(GaResult { best: population[0].clone(), trace, population })
}
