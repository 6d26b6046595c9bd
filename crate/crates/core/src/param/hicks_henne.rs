use serde::{Deserialize, Serialize};

use super::{from_surfaces, naca_thickness};
use crate::error::{Error, Result};
use crate::evo::Bounds;
use crate::geometry::{CollocatedAirfoil, CollocationGrid};

/// Bumps per surface.
pub const HICKS_HENNE_BUMPS: usize = 6;

/// Bump widths and magnitudes per surface, added to NACA 0012.
///
/// A width `w` in `(0, 1]` divides the sine exponent: `w = 1` gives the
/// widest bump and smaller values sharpen it around its peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HicksHenneParams {
    pub widths_up: [f64; HICKS_HENNE_BUMPS],
    pub magnitudes_up: [f64; HICKS_HENNE_BUMPS],
    pub widths_lo: [f64; HICKS_HENNE_BUMPS],
    pub magnitudes_lo: [f64; HICKS_HENNE_BUMPS],
}

impl Default for HicksHenneParams {
    fn default() -> Self {
        let w = [0.5; HICKS_HENNE_BUMPS];
        let m = [0.0; HICKS_HENNE_BUMPS];
        Self { widths_up: w, magnitudes_up: m, widths_lo: w, magnitudes_lo: m }
    }
}

/// Peak location of bump `i` (0-based), cosine-distributed over the chord.
pub fn bump_peak(i: usize) -> f64 {
    0.5 * (1.0 - (std::f64::consts::PI * (i + 1) as f64 / (HICKS_HENNE_BUMPS + 1) as f64).cos())
}

/// `sin^exponent(pi x^(ln 0.5 / ln h))`: zero at both ends, one at `x = h`.
pub fn hicks_henne_bump(x: f64, h: f64, exponent: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let s = (std::f64::consts::PI * x.powf(0.5f64.ln() / h.ln())).sin();
    s.max(0.0).powf(exponent)
}

impl HicksHenneParams {
    pub const DIM: usize = 4 * HICKS_HENNE_BUMPS;

    pub fn default_bounds() -> Bounds {
        let mut b = Vec::with_capacity(Self::DIM);
        for _ in 0..2 {
            b.extend([(0.1, 1.0); HICKS_HENNE_BUMPS]);
            b.extend([(-0.08, 0.08); HICKS_HENNE_BUMPS]);
        }
        b
    }

    /// Upper widths, upper magnitudes, lower widths, lower magnitudes.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != Self::DIM {
            return Err(Error::Contract(format!("Hicks-Henne takes {} variables, got {}", Self::DIM, v.len())));
        }
        let block = |k: usize| {
            let mut a = [0.0; HICKS_HENNE_BUMPS];
            a.copy_from_slice(&v[k * HICKS_HENNE_BUMPS..(k + 1) * HICKS_HENNE_BUMPS]);
            a
        };
        Ok(Self { widths_up: block(0), magnitudes_up: block(1), widths_lo: block(2), magnitudes_lo: block(3) })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        [self.widths_up, self.magnitudes_up, self.widths_lo, self.magnitudes_lo].concat()
    }
}

fn perturbation(widths: &[f64; HICKS_HENNE_BUMPS], magnitudes: &[f64; HICKS_HENNE_BUMPS], q: f64, x: f64) -> f64 {
    let mut d = 0.0;
    for i in 0..HICKS_HENNE_BUMPS {
        if magnitudes[i] != 0.0 {
            d += magnitudes[i] * hicks_henne_bump(x, bump_peak(i), q / widths[i]);
        }
    }
    d
}

/// NACA 0012 plus the bumps, with sine exponent `q / width` per bump.
pub fn hicks_henne_generate(p: &HicksHenneParams, q: f64, grid: CollocationGrid) -> Result<CollocatedAirfoil> {
    let ok = p.widths_up.iter().chain(&p.widths_lo).all(|w| *w > 0.0 && *w <= 1.0)
        && p.to_vec().iter().all(|v| v.is_finite());
    if !ok {
        return Err(Error::GenerationFailure("Hicks-Henne widths must lie in (0, 1]".into()));
    }
    from_surfaces(
        "hicks_henne",
        grid,
        |x| naca_thickness(0.12, x) + perturbation(&p.widths_up, &p.magnitudes_up, q, x),
        |x| -naca_thickness(0.12, x) + perturbation(&p.widths_lo, &p.magnitudes_lo, q, x),
    )
}
