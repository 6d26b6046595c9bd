//! Post-optimization analysis of a set of weight vectors: principal axes,
//! k-means clusters, per-cluster mean weights and shapes along an axis.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evo::ParetoArchive;
use crate::geometry::{CollocatedAirfoil, RepairConfig};
use crate::morph::{morph, BaselineSet, WeightVector};

pub const KMEANS_RESTARTS: usize = 10;
pub const KMEANS_MAX_ITER: usize = 300;
pub const KMEANS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub mean: Vec<f64>,
    /// Unit axes by descending variance. The largest-magnitude component of
    /// each axis is positive.
    pub axes: Vec<Vec<f64>>,
    /// Variance along each axis.
    pub variances: Vec<f64>,
    /// `None` when every point is identical and the ratios are undefined.
    pub explained_variance_ratio: Option<Vec<f64>>,
}

fn check_points(points: &[Vec<f64>], min: usize) -> Result<usize> {
    if points.len() < min {
        return Err(Error::Contract(format!("need at least {min} points, got {}", points.len())));
    }
    let d = points[0].len();
    if d == 0 {
        return Err(Error::Contract("points have no coordinates".into()));
    }
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Contract("points differ in dimension".into()));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Contract("non-finite coordinate".into()));
    }
    Ok(d)
}

fn mean(points: &[&[f64]], d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d];
    for p in points {
        for (a, b) in m.iter_mut().zip(p.iter()) {
            *a += b;
        }
    }
    m.iter_mut().for_each(|v| *v /= points.len() as f64);
    m
}

pub fn pca(points: &[Vec<f64>]) -> Result<PcaResult> {
    let d = check_points(points, 2)?;
    let n = points.len();
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    let mu = mean(&refs, d);
    let centered = DMatrix::from_fn(n, d, |i, j| points[i][j] - mu[j]);
    let cov = centered.transpose() * &centered / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let variances: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let axes = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let lead = v.iter().copied().fold(0.0, |acc: f64, c| if c.abs() > acc.abs() { c } else { acc });
            if lead < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
            v
        })
        .collect();
    let total: f64 = variances.iter().sum();
    let ratios = (total > 0.0).then(|| variances.iter().map(|v| v / total).collect());
    Ok(PcaResult { mean: mu, axes, variances, explained_variance_ratio: ratios })
}

impl PcaResult {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Coordinates of `p` on the first `k` axes.
    pub fn project(&self, p: &[f64], k: usize) -> Vec<f64> {
        self.axes
            .iter()
            .take(k)
            .map(|a| a.iter().zip(p.iter().zip(&self.mean)).map(|(a, (x, m))| a * (x - m)).sum())
            .collect()
    }

    /// Inverse of [`project`](Self::project) over as many axes as `coords` has.
    pub fn reconstruct(&self, coords: &[f64]) -> Vec<f64> {
        let mut p = self.mean.clone();
        for (c, a) in coords.iter().zip(&self.axes) {
            for (x, v) in p.iter_mut().zip(a) {
                *x += c * v;
            }
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after each Lloyd iteration of the kept restart.
    pub history: Vec<f64>,
}

impl Clustering {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k()];
        for &a in &self.assignments {
            s[a] += 1;
        }
        s
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, q) in centroids.iter().enumerate() {
        let d = dist2(p, q);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn count_distinct(points: &[Vec<f64>]) -> usize {
    // +0.0 and -0.0 are the same point
    let mut keys: Vec<Vec<u64>> = points.iter().map(|p| p.iter().map(|v| (v + 0.0).to_bits()).collect()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Seeding: the first centre uniformly, each further one with probability
/// proportional to the squared distance to the nearest chosen centre.
fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // every remaining distance is zero; only reachable with duplicates
            Err(_) => rng.gen_range(0..points.len()),
        };
        centroids.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &centroids[centroids.len() - 1]));
        }
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> Clustering {
    let (k, d) = (centroids.len(), points[0].len());
    let mut assignments = vec![0; points.len()];
    let mut history = Vec::new();
    loop {
        for (a, p) in assignments.iter_mut().zip(points) {
            *a = nearest(p, &centroids).0;
        }
        // An empty cluster takes over the point farthest from its centre.
        // That point has a positive distance, so its cluster keeps a member.
        for c in 0..k {
            if !assignments.contains(&c) {
                let far = (0..points.len())
                    .max_by(|&i, &j| {
                        let di = dist2(&points[i], &centroids[assignments[i]]);
                        let dj = dist2(&points[j], &centroids[assignments[j]]);
                        di.total_cmp(&dj).then(j.cmp(&i))
                    })
                    .unwrap_or(0);
                assignments[far] = c;
                centroids[c] = points[far].clone();
            }
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&[f64]> =
                points.iter().zip(&assignments).filter(|(_, &a)| a == c).map(|(p, _)| p.as_slice()).collect();
            if !members.is_empty() {
                *centroid = mean(&members, d);
            }
        }
        let inertia: f64 = points.iter().zip(&assignments).map(|(p, &a)| dist2(p, &centroids[a])).sum();
        let done = history.last().is_some_and(|&prev: &f64| prev - inertia < KMEANS_TOLERANCE)
            || history.len() + 1 >= KMEANS_MAX_ITER;
        history.push(inertia);
        if done {
            return Clustering { assignments, centroids, inertia, history };
        }
    }
}

/// Best of [`KMEANS_RESTARTS`] seeded Lloyd runs under Euclidean distance.
/// Restart `r` draws from stream `r` of the seed, and ties keep the lowest
/// restart, so the result does not depend on the thread count.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<Clustering> {
    check_points(points, 1)?;
    let distinct = count_distinct(points);
    if k == 0 || k > distinct {
        return Err(Error::Contract(format!("k = {k} with {distinct} distinct points")));
    }
    let runs: Vec<Clustering> = (0..KMEANS_RESTARTS)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            lloyd(points, plus_plus(points, k, &mut rng))
        })
        .collect();
    let mut best = None::<Clustering>;
    for c in runs {
        if best.as_ref().is_none_or(|b| c.inertia < b.inertia) {
            best = Some(c);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMeans {
    /// Mean weight vector per cluster; `None` for an empty cluster.
    pub clusters: Vec<Option<Vec<f64>>>,
    pub sizes: Vec<usize>,
    pub total: Vec<f64>,
}

pub fn cluster_means(points: &[Vec<f64>], c: &Clustering) -> Result<ClusterMeans> {
    let d = check_points(points, 1)?;
    if c.assignments.len() != points.len() || c.assignments.iter().any(|&a| a >= c.k()) {
        return Err(Error::Contract("clustering does not match the points".into()));
    }
    let clusters = (0..c.k())
        .map(|k| {
            let members: Vec<&[f64]> =
                points.iter().zip(&c.assignments).filter(|(_, &a)| a == k).map(|(p, _)| p.as_slice()).collect();
            (!members.is_empty()).then(|| mean(&members, d))
        })
        .collect();
    let all: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    Ok(ClusterMeans { clusters, sizes: c.sizes(), total: mean(&all, d) })
}

pub fn cluster_mean_weights(archive: &ParetoArchive, c: &Clustering) -> Result<ClusterMeans> {
    cluster_means(&archive_genomes(archive), c)
}

pub fn archive_genomes(archive: &ParetoArchive) -> Vec<Vec<f64>> {
    archive.members.iter().map(|m| m.genome.clone()).collect()
}

/// Morph of `mean + scale * axes[axis]`.
pub fn pca_axis_shape(
    b: &BaselineSet,
    result: &PcaResult,
    axis: usize,
    scale: f64,
    repair: Option<&RepairConfig>,
) -> Result<CollocatedAirfoil> {
    let a = result
        .axes
        .get(axis)
        .ok_or_else(|| Error::Contract(format!("axis {axis} out of range for d = {}", result.dim())))?;
    let w: Vec<f64> = result.mean.iter().zip(a).map(|(m, v)| m + scale * v).collect();
    let mut shape = morph(b, &WeightVector(w), repair)?;
    shape.name = format!("pca{}_{scale}", axis + 1);
    Ok(shape)
}

/// `index,cluster` rows.
pub fn assignments_csv(c: &Clustering) -> String {
    let mut s = String::from("index,cluster\n");
    for (i, a) in c.assignments.iter().enumerate() {
        let _ = writeln!(s, "{i},{a}");
    }
    s
}

/// `pc1,pc2,cluster` rows, one per point.
pub fn scatter_csv(result: &PcaResult, points: &[Vec<f64>], c: &Clustering) -> String {
    let mut s = String::from("pc1,pc2,cluster\n");
    for (p, a) in points.iter().zip(&c.assignments) {
        let x = result.project(p, 2);
        let _ = writeln!(s, "{},{},{a}", x[0], x.get(1).copied().unwrap_or(0.0));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_flag_undefined_ratios() {
        let r = pca(&vec![vec![1.0, 2.0]; 5]).unwrap();
        assert!(r.explained_variance_ratio.is_none());
        assert_eq!(r.mean, vec![1.0, 2.0]);
    }

    #[test]
    fn signed_zeros_are_one_point() {
        assert_eq!(count_distinct(&[vec![0.0], vec![-0.0]]), 1);
    }

    #[test]
    fn k_above_distinct_points_is_rejected() {
        let pts = vec![vec![0.0], vec![0.0], vec![1.0]];
        assert!(kmeans(&pts, 3, 0).is_err());
        assert_eq!(kmeans(&pts, 2, 0).unwrap().inertia, 0.0);
    }
}
