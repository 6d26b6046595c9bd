use std::f64::consts::PI;

use super::{FlowCondition, PolarEvaluator, PolarRow};
use crate::error::Result;
use crate::geometry::CollocatedAirfoil;

/// Where the leading-edge radius is sampled from the local thickness.
const RADIUS_STATION: f64 = 0.02;

/// Width of the stall roll-off, degrees.
const STALL_WIDTH: f64 = 1.5;

/// Geometry summary the synthetic model is built on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeFeatures {
    /// Maximum thickness.
    pub thickness: f64,
    /// Camber-line value of largest magnitude, signed.
    pub camber: f64,
    /// Leading-edge radius estimated as `h^2 / (2x)` from the half-thickness
    /// `h` at the station nearest `x = 0.02`.
    pub le_radius: f64,
    /// Smallest upper-minus-lower gap; negative for inverted shapes.
    pub min_thickness: f64,
}

impl ShapeFeatures {
    pub fn of(shape: &CollocatedAirfoil) -> Self {
        let grid = shape.grid();
        let thickness = shape.thickness();
        let camber = shape.camber();
        let t = thickness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let t_min = thickness.iter().copied().fold(f64::INFINITY, f64::min);
        let m = camber.iter().copied().fold(0.0, |acc: f64, c| if c.abs() > acc.abs() { c } else { acc });
        let k = (0..thickness.len())
            .min_by(|&a, &b| (grid.x(a) - RADIUS_STATION).abs().total_cmp(&(grid.x(b) - RADIUS_STATION).abs()))
            .unwrap_or(0);
        let (x, h) = (grid.x(k), 0.5 * thickness[k].max(0.0));
        let r = if x > 0.0 { h * h / (2.0 * x) } else { 0.0 };
        Self { thickness: t, camber: m, le_radius: r, min_thickness: t_min }
    }

    /// Lift slope per degree.
    pub fn lift_slope(&self) -> f64 {
        2.0 * PI * (1.0 + 0.77 * self.thickness) * PI / 180.0
    }

    /// Zero-lift angle, degrees.
    pub fn zero_lift_alpha(&self) -> f64 {
        -(180.0 / PI) * 2.0 * self.camber
    }

    /// Centre of the stall roll-off, degrees.
    pub fn stall_alpha(&self) -> f64 {
        4.0 + 50.0 * self.thickness + 150.0 * self.camber + 40.0 * self.le_radius.sqrt()
    }

    /// Attached-flow fraction: near 1 well below stall, near 0 beyond it.
    fn attached(&self, alpha: f64) -> f64 {
        1.0 / (1.0 + ((alpha - self.stall_alpha()) / STALL_WIDTH).exp())
    }

    pub fn cl(&self, alpha: f64) -> f64 {
        self.lift_slope() * (alpha - self.zero_lift_alpha()) * self.attached(alpha)
    }

    /// Parabolic drag bucket centred on the design lift coefficient, plus
    /// separation drag that only matters past stall.
    pub fn cd(&self, alpha: f64) -> f64 {
        let d0 = 0.0055 + 0.02 * self.thickness + 0.5 * self.camber * self.camber;
        let c_design = 10.0 * self.camber;
        let separated = 1.0 - self.attached(alpha);
        d0 + 0.006 * (self.cl(alpha) - c_design).powi(2) + 0.05 * separated * separated
    }

    /// Upper surface below the lower one somewhere inside the chord.
    pub fn inverted(&self) -> bool {
        self.min_thickness < -1e-9
    }
}

/// Closed-form stand-in for a flow solver.
///
/// `C_l = a (alpha - alpha_0) / (1 + exp((alpha - alpha_stall) / 1.5))` with
/// `a = 2 pi (1 + 0.77 t)` per radian, `alpha_0 = -2m` radians and
/// `alpha_stall = 4 + 50 t + 150 m + 40 sqrt(r)` degrees, where `t`, `m` and
/// `r` are the [`ShapeFeatures`]. `C_d = d0 + 0.006 (C_l - 10 m)^2 +
/// 0.05 (1 - sigma)^2` with `d0 = 0.0055 + 0.02 t + 0.5 m^2`, where `sigma`
/// is the logistic factor in `C_l`. Inverted shapes (upper surface below the
/// lower one) do not converge at any angle.
///
/// `C_l(alpha)` has exactly one local maximum: past the zero-lift angle the
/// slope changes sign once, because `(alpha - alpha_0)(1 - sigma)` is
/// increasing. Thinner and more cambered shapes reach higher `C_l / C_d`;
/// thicker shapes stall later. The Reynolds number is ignored.
#[derive(Debug, Clone, Copy, Default)]
pub struct SyntheticEvaluator;

impl PolarEvaluator for SyntheticEvaluator {
    fn evaluate(&self, shape: &CollocatedAirfoil, _flow: &FlowCondition, alphas: &[f64]) -> Result<Vec<PolarRow>> {
        let f = ShapeFeatures::of(shape);
        if f.inverted() {
            return Ok(alphas.iter().map(|&a| PolarRow::failed(a)).collect());
        }
        Ok(alphas.iter().map(|&alpha| PolarRow { alpha, cl: f.cl(alpha), cd: f.cd(alpha), converged: true }).collect())
    }
}
