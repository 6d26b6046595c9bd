//! Dominance, non-dominated sorting, crowding distance and the Pareto archive.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Individual, Sense};
use crate::error::{Error, Result};

/// `a` dominates `b`: no worse in every objective and strictly better in at
/// least one.
pub fn dominates(a: &[f64], b: &[f64], sense: Sense) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!("objective vectors differ in length: {} vs {}", a.len(), b.len())));
    }
    Ok(dominates_unchecked(a, b, sense))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64], sense: Sense) -> bool {
    let mut strict = false;
    for (&p, &q) in a.iter().zip(b) {
        let (p, q) = match sense {
            Sense::Maximize => (p, q),
            Sense::Minimize => (q, p),
        };
        if p < q {
            return false;
        }
        if p > q {
            strict = true;
        }
    }
    strict
}

/// Fast non-dominated sorting. Front `k` holds the indices that are
/// non-dominated once fronts `0..k` are removed; indices within a front are
/// ascending.
pub fn non_dominated_sort(objectives: &[Vec<f64>], sense: Sense) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        for q in p + 1..n {
            if dominates_unchecked(&objectives[p], &objectives[q], sense) {
                dominates_list[p].push(q);
                dominated_by_count[q] += 1;
            } else if dominates_unchecked(&objectives[q], &objectives[p], sense) {
                dominates_list[q].push(p);
                dominated_by_count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominates_list[p] {
                dominated_by_count[q] -= 1;
                if dominated_by_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front, in objective space.
///
/// Boundary members are infinite. An objective whose range over the front is
/// zero contributes nothing.
#[allow(clippy::needless_range_loop)] // m indexes objectives, not `front`
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let k = front[0].len();
    let mut dist = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..k {
        order.sort_by(|&a, &b| front[a][m].partial_cmp(&front[b][m]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        let lo = front[order[0]][m];
        let hi = front[order[n - 1]][m];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if !(range > 0.0) {
            continue;
        }
        for w in 1..n - 1 {
            let i = order[w];
            if dist[i].is_finite() {
                dist[i] += (front[order[w + 1]][m] - front[order[w - 1]][m]) / range;
            }
        }
    }
    dist
}

/// Hypervolume of a two-objective point set relative to `reference`.
pub fn hypervolume_2d(points: &[Vec<f64>], reference: [f64; 2], sense: Sense) -> f64 {
    // work in maximization form
    let flip = |v: f64| match sense {
        Sense::Maximize => v,
        Sense::Minimize => -v,
    };
    let r = [flip(reference[0]), flip(reference[1])];
    let mut pts: Vec<[f64; 2]> =
        points.iter().map(|p| [flip(p[0]), flip(p[1])]).filter(|p| p[0] > r[0] && p[1] > r[1]).collect();
    pts.sort_by(|a, b| b[0].partial_cmp(&a[0]).unwrap_or(Ordering::Equal));
    let mut area = 0.0;
    let mut level = r[1];
    for p in pts {
        if p[1] > level {
            area += (p[0] - r[0]) * (p[1] - level);
            level = p[1];
        }
    }
    area
}

/// Mutually non-dominated individuals without near-duplicate genomes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoArchive {
    pub members: Vec<Individual>,
    pub sense: Sense,
    pub tolerance: f64,
}

pub const DEFAULT_DEDUP_TOLERANCE: f64 = 1e-9;

impl ParetoArchive {
    pub fn new(sense: Sense, tolerance: f64) -> Self {
        Self { members: Vec::new(), sense, tolerance }
    }

    /// Insert `ind` unless it is dominated by, or duplicates, a member; members
    /// it dominates are evicted. Returns whether it was kept.
    pub fn insert(&mut self, ind: Individual) -> bool {
        let tol = self.tolerance;
        let duplicate = |m: &Individual| {
            m.genome.len() == ind.genome.len() && m.genome.iter().zip(&ind.genome).all(|(a, b)| (a - b).abs() <= tol)
        };
        if self.members.iter().any(|m| duplicate(m) || dominates_unchecked(&m.objectives, &ind.objectives, self.sense))
        {
            return false;
        }
        let sense = self.sense;
        self.members.retain(|m| !dominates_unchecked(&ind.objectives, &m.objectives, sense));
        let mut ind = ind;
        ind.rank = 0;
        self.members.push(ind);
        true
    }

    /// Archive of the first front of `population`, in population order.
    pub fn from_population(population: &[Individual], sense: Sense, tolerance: f64) -> Self {
        let objs: Vec<Vec<f64>> = population.iter().map(|i| i.objectives.clone()).collect();
        let mut archive = Self::new(sense, tolerance);
        if let Some(front) = non_dominated_sort(&objs, sense).first() {
            for &i in front {
                archive.insert(population[i].clone());
            }
        }
        archive
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Pairwise non-domination and dedup check, O(n^2).
    pub fn is_consistent(&self) -> bool {
        let n = self.members.len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (&self.members[i], &self.members[j]);
                if dominates_unchecked(&a.objectives, &b.objectives, self.sense) {
                    return false;
                }
                if a.genome.iter().zip(&b.genome).all(|(p, q)| (p - q).abs() <= self.tolerance) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        let max = Sense::Maximize;
        assert!(dominates(&[2.0, 3.0], &[1.0, 3.0], max).unwrap());
        assert!(!dominates(&[2.0, 3.0], &[2.0, 3.0], max).unwrap());
        assert!(!dominates(&[2.0, 1.0], &[1.0, 3.0], max).unwrap());
        assert!(!dominates(&[1.0, 3.0], &[2.0, 1.0], max).unwrap());
        assert!(dominates(&[1.0, 3.0], &[2.0, 3.0], Sense::Minimize).unwrap());
        assert!(dominates(&[1.0], &[1.0, 2.0], max).is_err());
    }

    #[test]
    fn sort_incomparable_and_chain() {
        let flat: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, -(i as f64)]).collect();
        assert_eq!(non_dominated_sort(&flat, Sense::Maximize), vec![vec![0, 1, 2, 3, 4]]);
        let chain: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, i as f64]).collect();
        assert_eq!(non_dominated_sort(&chain, Sense::Maximize), vec![vec![4], vec![3], vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn crowding_examples() {
        assert!(crowding_distance(&[vec![0.0, 1.0], vec![1.0, 0.0]]).iter().all(|d| d.is_infinite()));
        let line = vec![vec![0.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]];
        let d = crowding_distance(&line);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 2.0).abs() < 1e-15);
        let dup = vec![vec![1.0, 5.0]; 4];
        let d = crowding_distance(&dup);
        assert!(d.iter().all(|v| !v.is_nan()));
        assert_eq!(d.iter().filter(|v| v.is_finite()).count(), 2);
    }

    #[test]
    fn hypervolume_of_staircase() {
        let pts = vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]];
        assert_eq!(hypervolume_2d(&pts, [0.0, 0.0], Sense::Maximize), 6.0);
        let mins: Vec<Vec<f64>> = pts.iter().map(|p| vec![-p[0], -p[1]]).collect();
        assert_eq!(hypervolume_2d(&mins, [0.0, 0.0], Sense::Minimize), 6.0);
    }

    #[test]
    fn archive_evicts_and_deduplicates() {
        let mk = |g: f64, o: [f64; 2]| Individual::new(vec![g], o.to_vec());
        let mut a = ParetoArchive::new(Sense::Maximize, 1e-9);
        assert!(a.insert(mk(0.0, [1.0, 1.0])));
        assert!(a.insert(mk(1.0, [2.0, 0.5])));
        assert!(!a.insert(mk(2.0, [0.5, 0.5])));
        assert!(!a.insert(mk(1.0 + 1e-12, [3.0, 3.0])));
        assert!(a.insert(mk(3.0, [3.0, 3.0])));
        assert_eq!(a.len(), 1);
        assert!(a.is_consistent());
    }
}
