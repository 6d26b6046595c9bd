//! The morphing design space.
//!
//! A morphed shape is `P = (1 / sum_m w_m) * sum_n w_n S_n`, where `S_n` are
//! the collocated baselines. Negative weights extrapolate beyond the convex
//! hull of the baselines, which is what makes the space large; the
//! interpolation-only mode forbids them.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    collocate, find_intersections, load_airfoil, normalize, remove_intersections, AirfoilFormat, CollocatedAirfoil,
    CollocationGrid, RepairConfig,
};

/// Smallest admissible `|sum w_n|`.
pub const WEIGHT_SUM_FLOOR: f64 = 1e-6;

/// Normalized weights are rounded to multiples of this step, so rescaling
/// `w` by any factor leaves the blend unchanged even though `c * w_n` is
/// itself rounded.
pub const WEIGHT_RESOLUTION: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphMode {
    /// Weights in [-1, 1].
    Dbm,
    /// Weights in [0, 1] (interpolation only).
    DbmI,
}

impl MorphMode {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            MorphMode::Dbm => (-1.0, 1.0),
            MorphMode::DbmI => (0.0, 1.0),
        }
    }
}

impl std::str::FromStr for MorphMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dbm" => Ok(MorphMode::Dbm),
            "dbm_i" | "dbm-i" => Ok(MorphMode::DbmI),
            other => Err(Error::Configuration(format!("unknown morph mode '{other}'"))),
        }
    }
}

/// One morphing weight per baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn unit(n: usize, index: usize) -> Self {
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        Self(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn to_csv_row(&self) -> String {
        self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn from_csv_row(line: &str) -> Result<Self> {
        line.split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::InvalidWeights(format!("'{}' is not a number", t.trim())))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// A bound or sign constraint that a weight vector breaks.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// `index` is zero-based.
    OutOfBounds {
        index: usize,
        value: f64,
    },
    Negative {
        index: usize,
        value: f64,
    },
    NotFinite {
        index: usize,
    },
    DegenerateSum {
        sum: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} weights, found {found}")
            }
            Violation::OutOfBounds { index, value } => {
                write!(f, "weight #{} = {value} is outside [-1, 1]", index + 1)
            }
            Violation::Negative { index, value } => {
                write!(f, "weight #{} = {value} is negative (interpolation-only mode)", index + 1)
            }
            Violation::NotFinite { index } => write!(f, "weight #{} is not finite", index + 1),
            Violation::DegenerateSum { sum } => write!(f, "degenerate sum {sum:e}"),
        }
    }
}

/// Check a weight vector against the box and sign constraints of `mode`.
/// An empty list means the vector is valid.
pub fn validate(w: &WeightVector, mode: MorphMode) -> Vec<Violation> {
    let mut out = Vec::new();
    for (index, &value) in w.0.iter().enumerate() {
        if !value.is_finite() {
            out.push(Violation::NotFinite { index });
            continue;
        }
        if !(-1.0..=1.0).contains(&value) {
            out.push(Violation::OutOfBounds { index, value });
        }
        if mode == MorphMode::DbmI && value < 0.0 {
            out.push(Violation::Negative { index, value });
        }
    }
    let sum = w.sum();
    if !(sum.abs() > WEIGHT_SUM_FLOOR) {
        out.push(Violation::DegenerateSum { sum });
    }
    out
}

/// Uniform sample of the weight box for `mode`, deterministic in `seed`.
pub fn random_weights(seed: u64, n: usize, mode: MorphMode) -> WeightVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_weights(&mut rng, n, mode)
}

pub fn sample_weights<R: Rng>(rng: &mut R, n: usize, mode: MorphMode) -> WeightVector {
    let (lo, hi) = mode.bounds();
    WeightVector((0..n).map(|_| rng.gen_range(lo..=hi)).collect())
}

/// Entry of a baseline manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub path: PathBuf,
}

/// The collocated baseline shapes spanning a morphing space.
#[derive(Debug, Clone)]
pub struct BaselineSet {
    grid: CollocationGrid,
    shapes: Vec<CollocatedAirfoil>,
}

impl BaselineSet {
    pub fn new(shapes: Vec<CollocatedAirfoil>) -> Result<Self> {
        if shapes.len() < 2 {
            return Err(Error::Contract(format!("morphing needs at least 2 baselines, got {}", shapes.len())));
        }
        let grid = shapes[0].grid();
        for s in &shapes {
            if s.grid() != grid {
                return Err(Error::IncompatibleGrid { left: grid.intervals(), right: s.grid().intervals() });
            }
            if !find_intersections(s).is_empty() {
                return Err(Error::Contract(format!("baseline '{}' intersects itself", s.name)));
            }
        }
        Ok(Self { grid, shapes })
    }

    /// Baselines from a manifest; see [`load_shapes`].
    pub fn from_manifest(path: &Path, grid: CollocationGrid) -> Result<Self> {
        Self::new(load_shapes(path, grid)?)
    }

    pub fn grid(&self) -> CollocationGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn shapes(&self) -> &[CollocatedAirfoil] {
        &self.shapes
    }

    pub fn names(&self) -> Vec<&str> {
        self.shapes.iter().map(|s| s.name.as_str()).collect()
    }

    /// Normalized weighted sum of the baselines, without repair.
    pub fn blend(&self, w: &WeightVector) -> Result<CollocatedAirfoil> {
        if w.len() != self.len() {
            return Err(Error::InvalidWeights(format!("expected {} weights, got {}", self.len(), w.len())));
        }
        let sum = w.sum();
        if !(sum.abs() > WEIGHT_SUM_FLOOR) {
            return Err(Error::DegenerateWeights { sum });
        }
        let mut y: Option<Vec<f64>> = None;
        for (s, &wn) in self.shapes.iter().zip(&w.0) {
            let u = ((wn / sum) / WEIGHT_RESOLUTION).round() * WEIGHT_RESOLUTION;
            if u == 0.0 {
                continue;
            }
            match y.as_mut() {
                None => y = Some(s.y().iter().map(|v| u * v).collect()),
                Some(acc) => {
                    for (a, v) in acc.iter_mut().zip(s.y()) {
                        *a += u * v;
                    }
                }
            }
        }
        // a nonzero sum guarantees at least one nonzero weight
        CollocatedAirfoil::new("morph", self.grid, y.unwrap_or_else(|| vec![0.0; self.grid.len()]))
    }
}

/// Load every file listed in a JSON manifest (`[{name, path}]`, paths
/// relative to the manifest). Coordinate files are normalized and collocated;
/// `.csv` files are taken as already collocated and must be on `grid`.
pub fn load_shapes(path: &Path, grid: CollocationGrid) -> Result<Vec<CollocatedAirfoil>> {
    let entries = read_manifest(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    entries
        .iter()
        .map(|e| {
            let file = base.join(&e.path);
            let text = std::fs::read_to_string(&file)?;
            if file.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
                let c = CollocatedAirfoil::from_csv(&e.name, &text)?;
                if c.grid() != grid {
                    return Err(Error::IncompatibleGrid { left: grid.intervals(), right: c.grid().intervals() });
                }
                return Ok(c);
            }
            let raw = load_airfoil(&text, AirfoilFormat::detect(&text))?;
            let c = collocate(&normalize(&raw)?, grid)?;
            Ok(c.with_name(e.name.clone()))
        })
        .collect()
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Morph the baselines with weights `w`. When `repair` is given, a blend that
/// crosses itself is untangled or the non-repairable error is returned; a
/// clean blend is returned as is, without smoothing.
pub fn morph(b: &BaselineSet, w: &WeightVector, repair: Option<&RepairConfig>) -> Result<CollocatedAirfoil> {
    let blended = b.blend(w)?;
    match repair {
        Some(cfg) if !find_intersections(&blended).is_empty() => remove_intersections(&blended, cfg),
        _ => Ok(blended),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_set() -> BaselineSet {
        let g = CollocationGrid::new(4).unwrap();
        let a = CollocatedAirfoil::new("a", g, vec![0.0, 0.05, 0.0, -0.05, 0.0]).unwrap();
        let b = CollocatedAirfoil::new("b", g, vec![0.0, 0.08, 0.0, -0.02, 0.0]).unwrap();
        let c = CollocatedAirfoil::new("c", g, vec![0.01, 0.06, 0.0, -0.04, -0.01]).unwrap();
        BaselineSet::new(vec![a, b, c]).unwrap()
    }

    #[test]
    fn unit_and_scaled_weights_copy_a_baseline() {
        let b = toy_set();
        for c in [1.0, 0.5, 0.37, 1e-3] {
            let m = morph(&b, &WeightVector(vec![c, 0.0, 0.0]), None).unwrap();
            assert_eq!(m.y(), b.shapes()[0].y());
        }
    }

    #[test]
    fn equal_pair_is_pointwise_average() {
        let b = toy_set();
        let m = morph(&b, &WeightVector(vec![0.5, 0.5, 0.0]), None).unwrap();
        for i in 0..5 {
            let avg = 0.5 * (b.shapes()[0].y()[i] + b.shapes()[1].y()[i]);
            assert!((m.y()[i] - avg).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_sum_is_an_error() {
        let b = toy_set();
        let r = morph(&b, &WeightVector(vec![0.5, -0.5, 0.0]), None);
        assert!(matches!(r, Err(Error::DegenerateWeights { .. })));
        let r = morph(&b, &WeightVector(vec![0.5, 0.5]), None);
        assert!(matches!(r, Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn validate_modes() {
        let w = WeightVector(vec![0.2, -0.3, 0.4]);
        assert!(validate(&w, MorphMode::Dbm).is_empty());
        let v = validate(&w, MorphMode::DbmI);
        assert_eq!(v, vec![Violation::Negative { index: 1, value: -0.3 }]);
        assert!(v[0].to_string().contains("#2"));
        let zero = WeightVector(vec![0.5, -0.5]);
        assert!(matches!(validate(&zero, MorphMode::Dbm)[..], [Violation::DegenerateSum { .. }]));
        assert!(validate(&zero, MorphMode::Dbm)[0].to_string().contains("degenerate sum"));
        let big = WeightVector(vec![1.5, 0.0]);
        assert_eq!(validate(&big, MorphMode::Dbm), vec![Violation::OutOfBounds { index: 0, value: 1.5 }]);
    }

    #[test]
    fn random_weights_are_deterministic_and_in_box() {
        assert_eq!(random_weights(42, 25, MorphMode::Dbm), random_weights(42, 25, MorphMode::Dbm));
        assert_ne!(random_weights(42, 25, MorphMode::Dbm), random_weights(43, 25, MorphMode::Dbm));
        let w = random_weights(7, 25, MorphMode::DbmI);
        assert!(w.0.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn random_weights_mean_is_box_midpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for mode in [MorphMode::Dbm, MorphMode::DbmI] {
            let n = 10_000;
            let mut mean = [0.0; 5];
            for _ in 0..n {
                let w = sample_weights(&mut rng, 5, mode);
                for (m, v) in mean.iter_mut().zip(&w.0) {
                    *m += v / n as f64;
                }
            }
            let (lo, hi) = mode.bounds();
            assert!(mean.iter().all(|m| (m - 0.5 * (lo + hi)).abs() < 0.05), "{mean:?}");
        }
    }

    #[test]
    fn csv_row_round_trip() {
        let w = WeightVector(vec![0.25, -1.0, 1e-3]);
        assert_eq!(WeightVector::from_csv_row(&w.to_csv_row()).unwrap(), w);
        assert!(WeightVector::from_csv_row("0.1, x").is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("dbm".parse::<MorphMode>().unwrap(), MorphMode::Dbm);
        assert_eq!("dbm_i".parse::<MorphMode>().unwrap(), MorphMode::DbmI);
        assert!("other".parse::<MorphMode>().is_err());
    }
}
