//! Airfoil geometry: raw coordinate lists, the collocation grid, collocated
//! shapes and the shape-error metric.
//!
//! A collocated airfoil is a vector of `F + 1` y-coordinates sampled at
//! `x_i = |1 - 2i/F|`. The first half runs along the upper surface from the
//! trailing edge to the leading edge, the second half back along the lower
//! surface. Every shape on the same grid is in one-to-one correspondence with
//! every other, which is what makes weighted morphing well defined.

mod intersect;
mod io;

pub use intersect::{find_intersections, remove_intersections, IntersectionRecord, RepairConfig};
pub use io::{load_airfoil, AirfoilFormat, CollocatedRecord};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered (x, y) coordinates in chord units, traversed upper trailing edge,
/// leading edge, lower trailing edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAirfoil {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl RawAirfoil {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::DegenerateInput(format!("an airfoil needs at least 3 points, got {}", points.len())));
        }
        if let Some(k) = points.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::DegenerateInput(format!("point {} is not finite", k + 1)));
        }
        Ok(Self { name: name.into(), points })
    }

    /// Index of the leading edge, taken as the first point of minimum x.
    pub fn leading_edge_index(&self) -> usize {
        let mut best = 0;
        for (k, p) in self.points.iter().enumerate() {
            if p.0 < self.points[best].0 {
                best = k;
            }
        }
        best
    }
}

/// Translate and scale an airfoil to unit chord with the leading edge at x = 0.
///
/// The same factor scales x and y, and y is not shifted.
pub fn normalize(a: &RawAirfoil) -> Result<RawAirfoil> {
    let (lo, hi) = a.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let chord = hi - lo;
    if !(chord > 0.0) {
        return Err(Error::DegenerateInput(format!("zero chord in '{}'", a.name)));
    }
    let points = a
        .points
        .iter()
        .map(|&(x, y)| {
            // keep the extremes exact so repeated normalization is a no-op
            let xn = if x == lo {
                0.0
            } else if x == hi {
                1.0
            } else {
                (x - lo) / chord
            };
            (xn, y / chord)
        })
        .collect();
    Ok(RawAirfoil { name: a.name.clone(), points })
}

/// The fixed abscissae `x_i = |1 - 2i/F|`, `i = 0..=F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollocationGrid {
    intervals: usize,
}

impl CollocationGrid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 || !intervals.is_multiple_of(2) {
            return Err(Error::Contract(format!("collocation intervals must be even and at least 2, got {intervals}")));
        }
        Ok(Self { intervals })
    }

    /// Number of intervals `F`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the leading edge, `F/2`.
    pub fn leading_edge(&self) -> usize {
        self.intervals / 2
    }

    pub fn x(&self, i: usize) -> f64 {
        let f = self.intervals as i64;
        let k = (f - 2 * i as i64).abs();
        k as f64 / f as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Index on the opposite surface at the same x.
    pub fn mirror(&self, i: usize) -> usize {
        self.intervals - i
    }
}

/// An airfoil sampled on a [`CollocationGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CollocatedAirfoil {
    pub name: String,
    grid: CollocationGrid,
    y: Vec<f64>,
}

impl CollocatedAirfoil {
    pub fn new(name: impl Into<String>, grid: CollocationGrid, y: Vec<f64>) -> Result<Self> {
        if y.len() != grid.len() {
            return Err(Error::Contract(format!(
                "expected {} y-coordinates for F = {}, got {}",
                grid.len(),
                grid.intervals(),
                y.len()
            )));
        }
        if let Some(k) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!("y[{k}] is not finite")));
        }
        Ok(Self { name: name.into(), grid, y })
    }

    pub fn grid(&self) -> CollocationGrid {
        self.grid
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn into_y(self) -> Vec<f64> {
        self.y
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.y.iter().enumerate().map(|(i, &y)| (self.grid.x(i), y)).collect()
    }

    pub fn to_raw(&self) -> RawAirfoil {
        RawAirfoil { name: self.name.clone(), points: self.points() }
    }

    /// Upper minus lower surface at each station from the trailing edge
    /// (index 0) to the leading edge (index F/2).
    pub fn thickness(&self) -> Vec<f64> {
        let le = self.grid.leading_edge();
        (0..=le).map(|k| self.y[k] - self.y[self.grid.mirror(k)]).collect()
    }

    /// Mean of upper and lower surface at each station, trailing edge first.
    pub fn camber(&self) -> Vec<f64> {
        let le = self.grid.leading_edge();
        (0..=le).map(|k| 0.5 * (self.y[k] + self.y[self.grid.mirror(k)])).collect()
    }

    pub fn max_thickness(&self) -> f64 {
        self.thickness().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Resample a normalized airfoil onto `grid` by piecewise-linear interpolation
/// in x, one surface at a time. Stations beyond the end of a surface (a
/// trailing edge that stops short of x = 1) are extrapolated from the last
/// segment.
pub fn collocate(a: &RawAirfoil, grid: CollocationGrid) -> Result<CollocatedAirfoil> {
    if a.points.len() < 3 {
        return Err(Error::DegenerateInput("fewer than 3 points".into()));
    }
    let le = a.leading_edge_index();
    if le == 0 || le == a.points.len() - 1 {
        return Err(Error::Resampling(format!("'{}': leading edge is at an end of the point list", a.name)));
    }
    let upper: Vec<(f64, f64)> = a.points[..=le].iter().rev().copied().collect();
    let lower: Vec<(f64, f64)> = a.points[le..].to_vec();
    check_monotone(&upper, &a.name, "upper")?;
    check_monotone(&lower, &a.name, "lower")?;

    let half = grid.leading_edge();
    let mut y = vec![0.0; grid.len()];
    for (i, yi) in y.iter_mut().enumerate() {
        let surface = if i <= half { &upper } else { &lower };
        *yi = interpolate(surface, grid.x(i));
    }
    CollocatedAirfoil::new(a.name.clone(), grid, y)
}

fn check_monotone(surface: &[(f64, f64)], name: &str, which: &str) -> Result<()> {
    if let Some(k) = surface.windows(2).position(|w| w[1].0 <= w[0].0) {
        return Err(Error::Resampling(format!(
            "'{name}': {which} surface x is not strictly increasing at point {} from the leading edge",
            k + 1
        )));
    }
    Ok(())
}

/// Linear interpolation on a strictly increasing x table, exact at the knots.
pub(crate) fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    let n = table.len();
    debug_assert!(n >= 2);
    // segment k covers [x_k, x_{k+1}); clamp to the end segments for extrapolation
    let k = table.partition_point(|p| p.0 <= x).saturating_sub(1).min(n - 2);
    let (x0, y0) = table[k];
    let (x1, y1) = table[k + 1];
    if x == x0 {
        return y0;
    }
    if x == x1 {
        return y1;
    }
    let t = (x - x0) / (x1 - x0);
    y0 + t * (y1 - y0)
}

/// Area-weighted mean absolute error, `(2/F) * sum_i |y_i^a - y_i^b|`.
///
/// The factor of two makes the value a fraction of the squared chord; multiply
/// by 100 to report it in percent.
pub fn mae(a: &CollocatedAirfoil, b: &CollocatedAirfoil) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::IncompatibleGrid { left: a.grid.intervals(), right: b.grid.intervals() });
    }
    Ok(mae_slices(&a.y, &b.y, a.grid.intervals()))
}

pub(crate) fn mae_slices(a: &[f64], b: &[f64], intervals: usize) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum();
    2.0 * sum / intervals as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(points: &[(f64, f64)]) -> RawAirfoil {
        RawAirfoil::new("t", points.to_vec()).unwrap()
    }

    #[test]
    fn grid_endpoints_and_symmetry() {
        let g = CollocationGrid::new(10).unwrap();
        assert_eq!(g.x(0), 1.0);
        assert_eq!(g.x(5), 0.0);
        assert_eq!(g.x(10), 1.0);
        for i in 0..=10 {
            assert_eq!(g.x(i), g.x(10 - i));
        }
        assert!(CollocationGrid::new(7).is_err());
        assert!(CollocationGrid::new(0).is_err());
    }

    #[test]
    fn normalize_scales_uniformly() {
        let a = raw(&[(2.0, 0.2), (0.0, 0.0), (2.0, -0.1)]);
        let n = normalize(&a).unwrap();
        assert_eq!(n.points, vec![(1.0, 0.1), (0.0, 0.0), (1.0, -0.05)]);
    }

    #[test]
    fn normalize_translates_without_scaling() {
        let a = raw(&[(1.3, 0.01), (0.3, 0.02), (0.8, 0.0), (1.3, -0.01)]);
        let n = normalize(&a).unwrap();
        let expect = [(1.0, 0.01), (0.0, 0.02), (0.5, 0.0), (1.0, -0.01)];
        for (p, q) in n.points.iter().zip(expect) {
            assert!((p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_identity_on_unit_chord() {
        let a = raw(&[(1.0, 0.01), (0.25, 0.05), (0.0, 0.0), (0.5, -0.03), (1.0, 0.0)]);
        assert_eq!(normalize(&a).unwrap(), a);
    }

    #[test]
    fn normalize_rejects_zero_chord() {
        let a = raw(&[(0.5, 0.1), (0.5, 0.0), (0.5, -0.1)]);
        assert!(matches!(normalize(&a), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn flat_plate_collocates_to_zeros() {
        let a = raw(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let c = collocate(&a, CollocationGrid::new(40).unwrap()).unwrap();
        assert_eq!(c.y().len(), 41);
        assert!(c.y().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn short_surface_is_extrapolated() {
        let a = raw(&[(0.9, 0.09), (0.0, 0.0), (1.0, -0.1)]);
        let c = collocate(&a, CollocationGrid::new(2).unwrap()).unwrap();
        assert!((c.y()[0] - 0.1).abs() < 1e-12);
        assert_eq!(c.y()[1], 0.0);
        assert_eq!(c.y()[2], -0.1);
    }

    #[test]
    fn non_monotone_surface_is_rejected() {
        let a = raw(&[(1.0, 0.0), (0.4, 0.05), (0.6, 0.06), (0.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(collocate(&a, CollocationGrid::new(10).unwrap()), Err(Error::Resampling(_))));
    }

    #[test]
    fn mae_of_constant_offset() {
        let g = CollocationGrid::new(8).unwrap();
        let a = CollocatedAirfoil::new("a", g, vec![0.0; 9]).unwrap();
        let b = CollocatedAirfoil::new("b", g, vec![0.01; 9]).unwrap();
        let v = mae(&a, &b).unwrap();
        assert!((v - 2.0 * 0.01 * 9.0 / 8.0).abs() < 1e-15);
        assert_eq!(mae(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn mae_rejects_grid_mismatch() {
        let a = CollocatedAirfoil::new("a", CollocationGrid::new(4).unwrap(), vec![0.0; 5]).unwrap();
        let b = CollocatedAirfoil::new("b", CollocationGrid::new(6).unwrap(), vec![0.0; 7]).unwrap();
        assert!(matches!(mae(&a, &b), Err(Error::IncompatibleGrid { left: 4, right: 6 })));
    }
}
