//! Self-intersection detection and repair for collocated contours.
//!
//! On the collocation grid the upper segment `(k, k+1)` and the lower segment
//! `(F-1-k, F-k)` span exactly the same x-interval, and no other pair of
//! non-adjacent segments overlaps in x. A self-crossing is therefore a sign
//! change of the thickness `y_k - y_{F-k}` between neighbouring stations,
//! which makes detection linear in `F`.

use serde::{Deserialize, Serialize};

use super::CollocatedAirfoil;
use crate::error::{Error, Result};

/// A crossing between segments `(i, i+1)` and `(j, j+1)`, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub i: usize,
    pub j: usize,
    pub point: (f64, f64),
}

/// Every crossing of the contour with itself.
///
/// Coincident stretches (zero thickness over a run of stations, as on a flat
/// plate) are not crossings. A crossing that passes exactly through a run of
/// zero-thickness stations is reported once, at the segment entering the run.
pub fn find_intersections(a: &CollocatedAirfoil) -> Vec<IntersectionRecord> {
    let grid = a.grid();
    let y = a.y();
    let le = grid.leading_edge();
    let thickness = |k: usize| y[k] - y[grid.mirror(k)];

    let mut out = Vec::new();
    let mut k = 0;
    while k < le {
        let d0 = thickness(k);
        if d0 == 0.0 {
            k += 1;
            continue;
        }
        let d1 = thickness(k + 1);
        if d0 * d1 < 0.0 {
            let t = d0 / (d0 - d1);
            let (x0, x1) = (grid.x(k), grid.x(k + 1));
            let point = (x0 + t * (x1 - x0), y[k] + t * (y[k + 1] - y[k]));
            out.push(IntersectionRecord { i: k, j: grid.mirror(k + 1), point });
            k += 1;
        } else if d1 == 0.0 {
            // Skip over the zero run and compare signs on either side. A run
            // that reaches the leading edge closes the contour, not a crossing.
            let mut m = k + 1;
            while m < le && thickness(m) == 0.0 {
                m += 1;
            }
            if m < le && d0 * thickness(m) < 0.0 {
                let point = (grid.x(k + 1), y[k + 1]);
                out.push(IntersectionRecord { i: k, j: grid.mirror(k + 1), point });
            }
            k = m;
        } else {
            k += 1;
        }
    }
    out
}

/// Knobs for [`remove_intersections`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepairConfig {
    /// Points removed on each side of a former crossing before re-interpolating.
    pub neighborhood: usize,
    /// Width of the centred moving average applied after the flips (odd).
    pub smooth_window: usize,
    /// Maximum number of flip passes before the shape is declared unrepairable.
    pub max_passes: usize,
}

impl Default for RepairConfig {
    fn default() -> Self {
        Self { neighborhood: 5, smooth_window: 7, max_passes: 20 }
    }
}

impl RepairConfig {
    pub fn validate(&self) -> Result<()> {
        if self.neighborhood < 1 {
            return Err(Error::Configuration("repair neighborhood must be at least 1".into()));
        }
        if self.smooth_window < 1 || self.smooth_window.is_multiple_of(2) {
            return Err(Error::Configuration(format!(
                "smooth_window must be odd and at least 1, got {}",
                self.smooth_window
            )));
        }
        Ok(())
    }
}

/// Untangle a self-intersecting contour.
///
/// Each pass flips the loop between one crossing's bracketing segments (the
/// y-values at indices `i+1..=j` are reversed, which swaps upper and lower
/// surface forward of the crossing), then deletes `neighborhood` points on
/// either side of both former crossing indices and refills them by linear
/// interpolation in index space. Once no crossing remains, one centred
/// moving average of width `smooth_window` is applied.
pub fn remove_intersections(a: &CollocatedAirfoil, cfg: &RepairConfig) -> Result<CollocatedAirfoil> {
    cfg.validate()?;
    let grid = a.grid();
    let mut shape = a.clone();
    let mut passes = 0;
    loop {
        let crossings = find_intersections(&shape);
        if crossings.is_empty() {
            let smoothed = moving_average(shape.y(), cfg.smooth_window);
            let candidate = CollocatedAirfoil::new(shape.name.clone(), grid, smoothed)?;
            // Smoothing almost never re-tangles a contour; when it does, keep repairing.
            if find_intersections(&candidate).is_empty() {
                return Ok(candidate);
            }
            shape = candidate;
            continue;
        }
        if passes == cfg.max_passes {
            return Err(Error::NonRepairable { passes, remaining: crossings.len() });
        }
        passes += 1;

        let c = crossings[0];
        let mut y = shape.into_y();
        y[c.i + 1..=c.j].reverse();
        refill(&mut y, c.i, cfg.neighborhood);
        refill(&mut y, c.j, cfg.neighborhood);
        shape = CollocatedAirfoil::new(a.name.clone(), grid, y)?;
    }
}

/// Replace points `c+1-n ..= c+n` by a straight line in index space between
/// the surviving neighbours `c-n` and `c+n+1`, clamped to the array.
fn refill(y: &mut [f64], c: usize, n: usize) {
    let last = y.len() - 1;
    let lo = c.saturating_sub(n);
    let hi = (c + n + 1).min(last);
    if hi <= lo + 1 {
        return;
    }
    let (ya, yb) = (y[lo], y[hi]);
    let span = (hi - lo) as f64;
    for (k, v) in y.iter_mut().enumerate().take(hi).skip(lo + 1) {
        let t = (k - lo) as f64 / span;
        *v = ya + t * (yb - ya);
    }
}

/// Centred moving average with the window truncated at both ends.
fn moving_average(y: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return y.to_vec();
    }
    let h = window / 2;
    let n = y.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in y {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h).min(n - 1);
            // direct sum keeps short windows free of prefix-sum cancellation
            if hi - lo < 64 {
                y[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
            } else {
                (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CollocationGrid;

    fn shape(f: usize, y: Vec<f64>) -> CollocatedAirfoil {
        CollocatedAirfoil::new("t", CollocationGrid::new(f).unwrap(), y).unwrap()
    }

    /// Symmetric lens with half-thickness 4x(1-x)·0.05.
    fn lens(f: usize) -> CollocatedAirfoil {
        let g = CollocationGrid::new(f).unwrap();
        let y = (0..=f)
            .map(|i| {
                let x = g.x(i);
                let h = 0.2 * x * (1.0 - x);
                if i <= f / 2 {
                    h
                } else {
                    -h
                }
            })
            .collect();
        shape(f, y)
    }

    #[test]
    fn flat_plate_has_no_crossings() {
        assert!(find_intersections(&shape(20, vec![0.0; 21])).is_empty());
    }

    #[test]
    fn lens_has_no_crossings() {
        assert!(find_intersections(&lens(40)).is_empty());
    }

    #[test]
    fn crossing_through_a_vertex_is_counted_once() {
        // thickness +, 0, - around station 2
        let y = vec![0.0, 0.1, 0.0, -0.1, 0.0, 0.1, 0.0, -0.1, 0.0];
        let c = find_intersections(&shape(8, y));
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].i, c[0].j), (1, 6));
        assert_eq!(c[0].point, (0.5, 0.0));
    }

    #[test]
    fn touching_vertex_is_not_a_crossing() {
        // thickness +, 0, + around station 2
        let y = vec![0.0, 0.1, 0.0, 0.1, 0.0, -0.1, 0.0, -0.1, 0.0];
        assert!(find_intersections(&shape(8, y)).is_empty());
    }

    #[test]
    fn window_one_is_identity() {
        let a = lens(40);
        let cfg = RepairConfig { smooth_window: 1, ..Default::default() };
        assert_eq!(remove_intersections(&a, &cfg).unwrap(), a);
    }

    #[test]
    fn inverted_leading_edge_is_flipped() {
        let f = 40;
        let mut y = lens(f).into_y();
        // swap surfaces forward of x = 0.5
        for k in 11..20 {
            y.swap(k, f - k);
        }
        let a = shape(f, y);
        assert_eq!(find_intersections(&a).len(), 1);
        let fixed = remove_intersections(&a, &RepairConfig::default()).unwrap();
        assert!(find_intersections(&fixed).is_empty());
        assert!(fixed.thickness()[1..20].iter().all(|&t| t > 0.0));
    }

    #[test]
    fn bad_config_is_rejected() {
        let a = lens(10);
        let even = RepairConfig { smooth_window: 4, ..Default::default() };
        assert!(matches!(remove_intersections(&a, &even), Err(Error::Configuration(_))));
        let zero = RepairConfig { neighborhood: 0, ..Default::default() };
        assert!(matches!(remove_intersections(&a, &zero), Err(Error::Configuration(_))));
    }

    #[test]
    fn pass_cap_reports_non_repairable() {
        let f = 40;
        let mut y = lens(f).into_y();
        for k in (2..18).step_by(4) {
            y.swap(k, f - k);
            y.swap(k + 1, f - k - 1);
        }
        let a = shape(f, y);
        let n = find_intersections(&a).len();
        assert!(n >= 4);
        let cfg = RepairConfig { max_passes: 1, neighborhood: 1, smooth_window: 1 };
        assert!(matches!(remove_intersections(&a, &cfg), Err(Error::NonRepairable { passes: 1, .. })));
    }

    #[test]
    fn moving_average_truncates_at_ends() {
        let v = moving_average(&[0.0, 3.0, 6.0, 9.0], 3);
        assert_eq!(v, vec![1.5, 3.0, 6.0, 7.5]);
    }
}
