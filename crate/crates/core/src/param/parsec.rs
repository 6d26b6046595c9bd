use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use super::from_surfaces;
use crate::error::{Error, Result};
use crate::evo::Bounds;
use crate::geometry::{CollocatedAirfoil, CollocationGrid};

/// PARSEC design variables. Angles are in degrees.
///
/// The trailing-edge slopes are `tan(-alpha_te - beta_te/2)` on the upper
/// surface and `tan(-alpha_te + beta_te/2)` on the lower one, so a positive
/// `alpha_te` turns the trailing edge downwards and `beta_te` opens the wedge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsecParams {
    pub r_le_up: f64,
    pub x_up: f64,
    pub y_up: f64,
    pub y_xx_up: f64,
    pub r_le_lo: f64,
    pub x_lo: f64,
    pub y_lo: f64,
    pub y_xx_lo: f64,
    pub y_te: f64,
    pub t_te: f64,
    pub alpha_te: f64,
    pub beta_te: f64,
}

impl ParsecParams {
    pub const DIM: usize = 12;

    /// Closest PARSEC description of NACA 0012: leading-edge radius from the
    /// thickness formula, crest of the closed-trailing-edge section and its
    /// trailing-edge wedge.
    pub fn naca0012() -> Self {
        Self {
            r_le_up: 0.015867,
            x_up: 0.29953,
            y_up: 0.060007,
            y_xx_up: -0.45395,
            r_le_lo: 0.015867,
            x_lo: 0.29953,
            y_lo: -0.060007,
            y_xx_lo: 0.45395,
            y_te: 0.0,
            t_te: 0.0,
            alpha_te: 0.0,
            beta_te: 16.54,
        }
    }

    pub fn default_bounds() -> Bounds {
        vec![
            (0.002, 0.06),
            (0.1, 0.7),
            (0.0, 0.2),
            (-2.5, 0.0),
            (0.001, 0.06),
            (0.1, 0.8),
            (-0.15, 0.05),
            (-1.0, 2.5),
            (-0.05, 0.05),
            (0.0, 0.03),
            (-25.0, 25.0),
            (0.0, 40.0),
        ]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != Self::DIM {
            return Err(Error::Contract(format!("PARSEC takes {} variables, got {}", Self::DIM, v.len())));
        }
        Ok(Self {
            r_le_up: v[0],
            x_up: v[1],
            y_up: v[2],
            y_xx_up: v[3],
            r_le_lo: v[4],
            x_lo: v[5],
            y_lo: v[6],
            y_xx_lo: v[7],
            y_te: v[8],
            t_te: v[9],
            alpha_te: v[10],
            beta_te: v[11],
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.r_le_up,
            self.x_up,
            self.y_up,
            self.y_xx_up,
            self.r_le_lo,
            self.x_lo,
            self.y_lo,
            self.y_xx_lo,
            self.y_te,
            self.t_te,
            self.alpha_te,
            self.beta_te,
        ]
    }

    /// Coefficients `a_1..a_6` of `y = sum a_n x^(n - 1/2)` for each surface.
    pub fn coefficients(&self) -> Result<([f64; 6], [f64; 6])> {
        let ok = self.r_le_up > 0.0
            && self.r_le_lo > 0.0
            && self.x_up > 0.0
            && self.x_up < 1.0
            && self.x_lo > 0.0
            && self.x_lo < 1.0
            && self.t_te >= 0.0
            && self.to_vec().iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::GenerationFailure(format!("PARSEC parameters out of range: {self:?}")));
        }
        let alpha = self.alpha_te.to_radians();
        let half_beta = 0.5 * self.beta_te.to_radians();
        let upper = solve_surface(
            (2.0 * self.r_le_up).sqrt(),
            self.x_up,
            self.y_up,
            self.y_xx_up,
            self.y_te + 0.5 * self.t_te,
            (-alpha - half_beta).tan(),
        )?;
        let lower = solve_surface(
            -(2.0 * self.r_le_lo).sqrt(),
            self.x_lo,
            self.y_lo,
            self.y_xx_lo,
            self.y_te - 0.5 * self.t_te,
            (-alpha + half_beta).tan(),
        )?;
        Ok((upper, lower))
    }
}

fn exponent(n: usize) -> f64 {
    n as f64 + 0.5
}

fn solve_surface(a1: f64, xc: f64, yc: f64, yxx: f64, y_end: f64, slope_end: f64) -> Result<[f64; 6]> {
    let mut m = Matrix6::<f64>::zeros();
    m[(0, 0)] = 1.0;
    for n in 0..6 {
        let e = exponent(n);
        m[(1, n)] = 1.0;
        m[(2, n)] = xc.powf(e);
        m[(3, n)] = e * xc.powf(e - 1.0);
        m[(4, n)] = e * (e - 1.0) * xc.powf(e - 2.0);
        m[(5, n)] = e;
    }
    let rhs = Vector6::new(a1, y_end, yc, 0.0, yxx, slope_end);
    let a = m.lu().solve(&rhs).ok_or_else(|| Error::GenerationFailure("singular PARSEC condition matrix".into()))?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::GenerationFailure("PARSEC coefficients are not finite".into()));
    }
    Ok([a[0], a[1], a[2], a[3], a[4], a[5]])
}

pub(crate) fn eval_poly(a: &[f64; 6], x: f64) -> f64 {
    a.iter().enumerate().map(|(n, c)| c * x.powf(exponent(n))).sum()
}

pub fn parsec_generate(p: &ParsecParams, grid: CollocationGrid) -> Result<CollocatedAirfoil> {
    let (up, lo) = p.coefficients()?;
    from_surfaces("parsec", grid, |x| eval_poly(&up, x), |x| eval_poly(&lo, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slope(a: &[f64; 6], x: f64) -> f64 {
        a.iter().enumerate().map(|(n, c)| c * exponent(n) * x.powf(exponent(n) - 1.0)).sum()
    }

    #[test]
    fn crest_and_trailing_edge_conditions() {
        let p = ParsecParams {
            r_le_up: 0.012,
            x_up: 0.35,
            y_up: 0.08,
            y_xx_up: -0.6,
            r_le_lo: 0.006,
            x_lo: 0.25,
            y_lo: -0.03,
            y_xx_lo: 0.3,
            y_te: 0.004,
            t_te: 0.002,
            alpha_te: 6.0,
            beta_te: 12.0,
        };
        let (up, lo) = p.coefficients().unwrap();
        assert!((eval_poly(&up, 0.35) - 0.08).abs() < 1e-8);
        assert!(slope(&up, 0.35).abs() < 1e-8);
        assert!((eval_poly(&lo, 0.25) + 0.03).abs() < 1e-8);
        assert!(slope(&lo, 0.25).abs() < 1e-8);
        assert!((eval_poly(&up, 1.0) - eval_poly(&lo, 1.0) - 0.002).abs() < 1e-8);
        assert!((slope(&up, 1.0) - (-12f64).to_radians().tan()).abs() < 1e-8);
    }

    #[test]
    fn degenerate_crest_is_a_generation_failure() {
        let mut p = ParsecParams::naca0012();
        p.x_up = 0.0;
        assert!(matches!(p.coefficients(), Err(Error::GenerationFailure(_))));
    }

    #[test]
    fn round_trip_slice() {
        let p = ParsecParams::naca0012();
        assert_eq!(ParsecParams::from_slice(&p.to_vec()).unwrap(), p);
    }
}
