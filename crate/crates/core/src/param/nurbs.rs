use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{from_surfaces, naca_thickness};
use crate::error::{Error, Result};
use crate::evo::Bounds;
use crate::geometry::{interpolate, CollocatedAirfoil, CollocationGrid};

/// Largest backwards step in x tolerated when mapping a curve onto the grid.
pub const FOLD_TOLERANCE: f64 = 1e-4;

const KNOTS: [f64; 10] = [0.0, 0.0, 0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0, 1.0, 1.0, 1.0];
const SAMPLES: usize = 2001;

/// One surface: a rational cubic B-spline from the leading edge at the origin
/// to the trailing edge at `(1, y_te)` through four weighted interior control
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NurbsSurface {
    pub points: [(f64, f64); 4],
    pub weights: [f64; 4],
    pub y_te: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NurbsParams {
    pub upper: NurbsSurface,
    pub lower: NurbsSurface,
}

impl NurbsSurface {
    const DIM: usize = 13;

    fn from_slice(v: &[f64]) -> Self {
        Self {
            points: [(v[0], v[1]), (v[2], v[3]), (v[4], v[5]), (v[6], v[7])],
            weights: [v[8], v[9], v[10], v[11]],
            y_te: v[12],
        }
    }

    fn extend_into(&self, out: &mut Vec<f64>) {
        for (x, y) in self.points {
            out.extend([x, y]);
        }
        out.extend(self.weights);
        out.push(self.y_te);
    }

    fn control_net(&self) -> ([(f64, f64); 6], [f64; 6]) {
        let p = self.points;
        let w = self.weights;
        ([(0.0, 0.0), p[0], p[1], p[2], p[3], (1.0, self.y_te)], [1.0, w[0], w[1], w[2], w[3], 1.0])
    }

    /// Point on the curve at parameter `t` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (p, w) = self.control_net();
        let n = basis(t);
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for i in 0..6 {
            let c = n[i] * w[i];
            sx += c * p[i].0;
            sy += c * p[i].1;
            sw += c;
        }
        (sx / sw, sy / sw)
    }

    /// The curve as a strictly increasing `(x, y)` table.
    fn table(&self) -> Result<Vec<(f64, f64)>> {
        let (p, w) = self.control_net();
        if w.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::GenerationFailure("NURBS weights must be positive".into()));
        }
        if p.iter().any(|(x, y)| !(x.is_finite() && y.is_finite() && (0.0..=1.0).contains(x))) {
            return Err(Error::GenerationFailure("NURBS control points must have x in [0, 1]".into()));
        }
        let mut table: Vec<(f64, f64)> = Vec::with_capacity(SAMPLES);
        let mut reach = f64::NEG_INFINITY;
        for k in 0..SAMPLES {
            // cosine spacing resolves the leading edge, where x grows like t^2
            let t = 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (SAMPLES - 1) as f64).cos());
            let (x, y) = self.eval(t.clamp(0.0, 1.0));
            if x < reach - FOLD_TOLERANCE {
                return Err(Error::GenerationFailure(format!("NURBS surface folds back by {:.2e} in x", reach - x)));
            }
            if x > reach {
                table.push((x, y));
                reach = x;
            }
        }
        if table.len() < 2 {
            return Err(Error::GenerationFailure("NURBS surface collapses to a point".into()));
        }
        Ok(table)
    }
}

/// Cubic B-spline basis on the clamped uniform knot vector; `t = 1` selects
/// the last control point.
fn basis(t: f64) -> [f64; 6] {
    let mut out = [0.0; 6];
    if t >= 1.0 {
        out[5] = 1.0;
        return out;
    }
    // degree 0
    let mut n = [0.0; 9];
    for (i, v) in n.iter_mut().enumerate() {
        if KNOTS[i] <= t && t < KNOTS[i + 1] {
            *v = 1.0;
        }
    }
    for d in 1..=3 {
        for i in 0..9 - d {
            let left = KNOTS[i + d] - KNOTS[i];
            let right = KNOTS[i + d + 1] - KNOTS[i + 1];
            let a = if left > 0.0 { (t - KNOTS[i]) / left * n[i] } else { 0.0 };
            let b = if right > 0.0 { (KNOTS[i + d + 1] - t) / right * n[i + 1] } else { 0.0 };
            n[i] = a + b;
        }
    }
    out.copy_from_slice(&n[..6]);
    out
}

impl NurbsParams {
    pub const DIM: usize = 26;

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != Self::DIM {
            return Err(Error::Contract(format!("NURBS takes {} variables, got {}", Self::DIM, v.len())));
        }
        Ok(Self {
            upper: NurbsSurface::from_slice(&v[..NurbsSurface::DIM]),
            lower: NurbsSurface::from_slice(&v[NurbsSurface::DIM..]),
        })
    }

    /// Per surface: `x1, y1, .., x4, y4, w1, .., w4, y_te`, upper first.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::DIM);
        self.upper.extend_into(&mut v);
        self.lower.extend_into(&mut v);
        v
    }

    pub fn default_bounds() -> Bounds {
        let surface = |y: (f64, f64)| {
            let mut b = vec![(0.0, 0.05), y, (0.0, 0.5), y, (0.1, 0.9), y, (0.3, 1.0), y];
            b.extend([(0.2, 5.0); 4]);
            b.push((-0.05, 0.05));
            b
        };
        let mut b = surface((-0.05, 0.25));
        b.extend(surface((-0.2, 0.1)));
        b
    }

    /// Least-squares fit of NACA 0012 with unit weights and fixed control
    /// abscissae; the lower surface mirrors the upper.
    pub fn naca0012() -> Result<Self> {
        let xs = [0.0, 0.08, 0.35, 0.75];
        let probe = NurbsSurface { points: xs.map(|x| (x, 0.0)), weights: [1.0; 4], y_te: 0.0 };
        let rows = 400;
        let mut a = DMatrix::<f64>::zeros(rows, 4);
        let mut b = DVector::<f64>::zeros(rows);
        for r in 0..rows {
            let t = (r as f64 + 0.5) / rows as f64;
            let n = basis(t);
            let x = probe.eval(t).0;
            for j in 0..4 {
                a[(r, j)] = n[j + 1];
            }
            b[r] = naca_thickness(0.12, x);
        }
        let y = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| Error::GenerationFailure(format!("NURBS fit failed: {e}")))?;
        let upper = NurbsSurface { points: [0, 1, 2, 3].map(|j| (xs[j], y[j])), weights: [1.0; 4], y_te: 0.0 };
        let lower = NurbsSurface { points: upper.points.map(|(x, y)| (x, -y)), ..upper };
        Ok(Self { upper, lower })
    }
}

pub fn nurbs_generate(p: &NurbsParams, grid: CollocationGrid) -> Result<CollocatedAirfoil> {
    let up = p.upper.table()?;
    let lo = p.lower.table()?;
    from_surfaces("nurbs", grid, |x| interpolate(&up, x), |x| interpolate(&lo, x))
}
