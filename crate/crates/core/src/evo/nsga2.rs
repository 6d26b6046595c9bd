use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operators::{clip, polynomial_mutation, sbx_crossover, uniform_genome};
use super::pareto::{crowding_distance, hypervolume_2d, non_dominated_sort, ParetoArchive};
use super::{check_bounds, evaluate_all, Bounds, GaConfig, Individual, Sense};
use crate::error::{Error, Result};

/// Per-generation summary; generation 0 is the initial population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationMetrics {
    pub generation: usize,
    pub front_size: usize,
    /// Best value of each objective in the population.
    pub best: Vec<f64>,
    /// Two-objective hypervolume of the first front, when a reference is set.
    pub hypervolume: Option<f64>,
    pub archive_consistent: bool,
}

#[derive(Debug, Clone)]
pub struct Nsga2Result {
    pub archive: ParetoArchive,
    pub history: Vec<GenerationMetrics>,
    pub population: Vec<Individual>,
}

/// Elitist (mu + lambda) NSGA-II.
///
/// `f` must be total: encode failures as worst-case objective values. Seeds
/// go into the initial population ahead of uniform samples. Objective
/// evaluations run concurrently but are gathered in index order, so the
/// result depends only on the seed.
pub fn nsga2<F>(
    f: F,
    bounds: &Bounds,
    cfg: &GaConfig,
    sense: Sense,
    seeds: &[Vec<f64>],
    hv_reference: Option<[f64; 2]>,
    dedup_tolerance: f64,
) -> Result<Nsga2Result>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
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
    let objectives = evaluate_all(&genomes, &f);
    let k = objectives.first().map_or(0, Vec::len);
    if k == 0 || objectives.iter().any(|o| o.len() != k) {
        return Err(Error::Contract("objective function returned inconsistent lengths".into()));
    }
    let mut pop: Vec<Individual> = genomes.into_iter().zip(objectives).map(|(g, o)| Individual::new(g, o)).collect();
    pop = environmental_selection(pop, n, sense);

    let metrics = |generation: usize, pop: &[Individual]| {
        let archive = ParetoArchive::from_population(pop, sense, dedup_tolerance);
        let best = (0..k)
            .map(|m| {
                let it = pop.iter().map(|i| i.objectives[m]);
                match sense {
                    Sense::Maximize => it.fold(f64::NEG_INFINITY, f64::max),
                    Sense::Minimize => it.fold(f64::INFINITY, f64::min),
                }
            })
            .collect();
        let front: Vec<Vec<f64>> = archive.members.iter().map(|m| m.objectives.clone()).collect();
        GenerationMetrics {
            generation,
            front_size: archive.len(),
            best,
            hypervolume: hv_reference.filter(|_| k == 2).map(|r| hypervolume_2d(&front, r, sense)),
            archive_consistent: archive.is_consistent(),
        }
    };
    let mut history = vec![metrics(0, &pop)];
    let rate = cfg.mutation_rate_for(d);

    for generation in 1..=cfg.max_generations {
        let tournament = |rng: &mut ChaCha8Rng| {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if crowded_less(&pop[a], &pop[b]) || (!crowded_less(&pop[b], &pop[a]) && a <= b) {
                a
            } else {
                b
            }
        };
        let mut children = Vec::with_capacity(n);
        while children.len() < n {
            let p1 = tournament(&mut rng);
            let p2 = tournament(&mut rng);
            let (mut c1, mut c2) = if rng.gen::<f64>() < cfg.crossover_rate {
                sbx_crossover(
                    &mut rng,
                    &pop[p1].genome,
                    &pop[p2].genome,
                    bounds,
                    cfg.crossover_eta,
                    cfg.crossover_gene_rate,
                )
            } else {
                (pop[p1].genome.clone(), pop[p2].genome.clone())
            };
            polynomial_mutation(&mut rng, &mut c1, bounds, rate, cfg.mutation_eta);
            polynomial_mutation(&mut rng, &mut c2, bounds, rate, cfg.mutation_eta);
            children.push(c1);
            children.push(c2);
        }
        let objectives = evaluate_all(&children, &f);
        let mut combined = pop;
        combined.extend(children.into_iter().zip(objectives).map(|(g, o)| Individual::new(g, o)));
        pop = environmental_selection(combined, n, sense);
        history.push(metrics(generation, &pop));
    }

    let archive = ParetoArchive::from_population(&pop, sense, dedup_tolerance);
    Ok(Nsga2Result { archive, history, population: pop })
}

/// Crowded-comparison: lower rank wins, then larger crowding distance.
fn crowded_less(a: &Individual, b: &Individual) -> bool {
    a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding)
}

/// Keep `n` individuals by front, breaking the last front by crowding.
fn environmental_selection(pop: Vec<Individual>, n: usize, sense: Sense) -> Vec<Individual> {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives.clone()).collect();
    let fronts = non_dominated_sort(&objs, sense);
    let mut selected = Vec::with_capacity(n);
    for (rank, front) in fronts.iter().enumerate() {
        let front_objs: Vec<Vec<f64>> = front.iter().map(|&i| objs[i].clone()).collect();
        let dist = crowding_distance(&front_objs);
        let mut members: Vec<(usize, f64)> = front.iter().copied().zip(dist).collect();
        if selected.len() + members.len() > n {
            members.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
            members.truncate(n - selected.len());
        }
        for (i, c) in members {
            let mut ind = pop[i].clone();
            ind.rank = rank;
            ind.crowding = c;
            selected.push(ind);
        }
        if selected.len() == n {
            break;
        }
    }
    selected
}
