//! Aerodynamic objectives from a polar: the maximum lift-drag ratio and the
//! stall-angle tolerance, over a pluggable polar evaluator.

mod synthetic;
pub mod xfoil;

pub use synthetic::{ShapeFeatures, SyntheticEvaluator};
pub use xfoil::{XfoilConfig, XfoilEvaluator, XFOIL_ENV};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{find_intersections, CollocatedAirfoil};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowCondition {
    /// Chord Reynolds number.
    pub re: f64,
    pub mach: f64,
    /// Transition amplification exponent.
    pub n_crit: f64,
}

impl Default for FlowCondition {
    fn default() -> Self {
        Self { re: 1e6, mach: 0.0, n_crit: 9.0 }
    }
}

impl FlowCondition {
    pub fn validate(&self) -> Result<()> {
        if !(self.re > 0.0 && self.re.is_finite()) || !(self.mach >= 0.0 && self.mach < 1.0) || !(self.n_crit > 0.0) {
            return Err(Error::Configuration(format!("invalid flow condition {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarRow {
    /// Angle of attack in degrees.
    pub alpha: f64,
    pub cl: f64,
    pub cd: f64,
    pub converged: bool,
}

impl PolarRow {
    pub fn failed(alpha: f64) -> Self {
        Self { alpha, cl: f64::NAN, cd: f64::NAN, converged: false }
    }

    fn usable(&self) -> bool {
        self.converged && self.cl.is_finite() && self.cd.is_finite() && self.cd > 0.0
    }
}

/// Rows sorted by strictly increasing angle of attack.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    rows: Vec<PolarRow>,
}

/// Rows are keyed on a micro-degree lattice so angles built by different
/// arithmetic still merge.
fn alpha_key(alpha: f64) -> i64 {
    (alpha * 1e6).round() as i64
}

impl Polar {
    /// Sort the rows; a later row replaces an earlier one at the same angle.
    pub fn new(rows: impl IntoIterator<Item = PolarRow>) -> Self {
        let mut map = BTreeMap::new();
        for r in rows {
            map.insert(alpha_key(r.alpha), r);
        }
        Self { rows: map.into_values().collect() }
    }

    pub fn rows(&self) -> &[PolarRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn converged(&self) -> impl Iterator<Item = &PolarRow> {
        self.rows.iter().filter(|r| r.usable())
    }

    fn contains(&self, alpha: f64) -> bool {
        let k = alpha_key(alpha);
        self.rows.binary_search_by_key(&k, |r| alpha_key(r.alpha)).is_ok()
    }

    /// `alpha,cl,cd,converged` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,cl,cd,converged\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.alpha, r.cl, r.cd, r.converged));
        }
        s
    }
}

/// Angle-of-attack scan: a rough pass over `[alpha_lo, alpha_hi]`, then fine
/// passes within `fine_margin` of the estimated CLD_max and stall angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanSchedule {
    pub rough_step: f64,
    pub fine_step: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub fine_margin: f64,
}

impl Default for ScanSchedule {
    fn default() -> Self {
        Self { rough_step: 1.0, fine_step: 0.25, alpha_lo: -5.0, alpha_hi: 25.0, fine_margin: 2.0 }
    }
}

impl ScanSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = self.fine_step > 0.0
            && self.fine_step <= self.rough_step
            && self.alpha_lo < self.alpha_hi
            && self.fine_margin >= 0.0
            && [self.rough_step, self.fine_step, self.alpha_lo, self.alpha_hi, self.fine_margin]
                .iter()
                .all(|v| v.is_finite());
        if !ok {
            return Err(Error::Configuration(format!("invalid scan schedule {self:?}")));
        }
        Ok(())
    }

    fn lattice(lo: f64, hi: f64, origin: f64, step: f64) -> Vec<f64> {
        let first = ((lo - origin) / step - 1e-9).ceil() as i64;
        let last = ((hi - origin) / step + 1e-9).floor() as i64;
        (first..=last).map(|k| origin + k as f64 * step).collect()
    }

    pub fn rough_alphas(&self) -> Vec<f64> {
        Self::lattice(self.alpha_lo, self.alpha_hi, self.alpha_lo, self.rough_step)
    }

    /// Fine angles around `center`, on the fine lattice anchored at `alpha_lo`.
    pub fn fine_alphas(&self, center: f64) -> Vec<f64> {
        let lo = (center - self.fine_margin).max(self.alpha_lo);
        let hi = (center + self.fine_margin).min(self.alpha_hi);
        Self::lattice(lo, hi, self.alpha_lo, self.fine_step)
    }
}

/// Anything that can produce polar rows for a shape. Rows may come back in any
/// order; angles the evaluator could not solve are reported as non-converged.
pub trait PolarEvaluator: Sync {
    fn evaluate(&self, shape: &CollocatedAirfoil, flow: &FlowCondition, alphas: &[f64]) -> Result<Vec<PolarRow>>;
}

/// Rough scan, then fine scans around the CLD_max and stall estimates; only
/// angles not already evaluated are requested.
pub fn evaluate_polar(
    shape: &CollocatedAirfoil,
    flow: &FlowCondition,
    sched: &ScanSchedule,
    eval: &dyn PolarEvaluator,
) -> Result<Polar> {
    flow.validate()?;
    sched.validate()?;
    if !find_intersections(shape).is_empty() {
        return Err(Error::DegenerateInput(format!("'{}' intersects itself", shape.name)));
    }
    let rough = Polar::new(eval.evaluate(shape, flow, &sched.rough_alphas())?);
    let (_, alpha_star) = cld_max(&rough)?;
    let mut rows = rough.rows.clone();
    let mut centers = vec![alpha_star];
    if let Ok(stall) = stall_angle(&rough) {
        centers.push(stall.alpha);
    }
    let mut merged = rough;
    for c in centers {
        let fresh: Vec<f64> = sched.fine_alphas(c).into_iter().filter(|&a| !merged.contains(a)).collect();
        if fresh.is_empty() {
            continue;
        }
        rows.extend(eval.evaluate(shape, flow, &fresh)?);
        merged = Polar::new(rows.iter().copied());
    }
    Ok(merged)
}

/// Maximum `C_l / C_d` over converged rows and its angle; ties go to the
/// smaller angle.
pub fn cld_max(p: &Polar) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for r in p.converged() {
        let cld = r.cl / r.cd;
        if best.is_none_or(|(b, _)| cld > b) {
            best = Some((cld, r.alpha));
        }
    }
    best.ok_or_else(|| Error::EvaluationFailure("polar has no converged rows".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stall {
    pub alpha: f64,
    /// The maximum sits at the edge of the scanned data, so the true stall
    /// angle may lie beyond it.
    pub censored: bool,
}

/// First angle `>= 0` at which `C_l` is at least as large as both converged
/// neighbours. On a plateau this picks its first row.
///
/// A maximum on the last (or first) converged row is returned as censored.
/// If `C_l` only falls from the first non-negative angle onwards, that angle
/// is returned, censored.
pub fn stall_angle(p: &Polar) -> Result<Stall> {
    let rows: Vec<&PolarRow> = p.converged().collect();
    let start = rows
        .iter()
        .position(|r| r.alpha >= 0.0)
        .ok_or_else(|| Error::EvaluationFailure("no converged rows at non-negative angles".into()))?;
    let last = rows.len() - 1;
    for i in start..=last {
        let left = i == 0 || rows[i].cl >= rows[i - 1].cl;
        let right = i == last || rows[i].cl >= rows[i + 1].cl;
        if left && right {
            return Ok(Stall { alpha: rows[i].alpha, censored: i == 0 || i == last });
        }
    }
    Ok(Stall { alpha: rows[start].alpha, censored: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePair {
    pub cld_max: f64,
    /// `max(0, alpha_s - alpha_at_cld_max)`, degrees.
    pub delta_alpha: f64,
    pub alpha_at_cld_max: f64,
    pub alpha_s: f64,
    pub stall_censored: bool,
    pub failed: bool,
}

impl ObjectivePair {
    /// The zero score given to shapes that cannot be evaluated.
    pub fn failed() -> Self {
        Self {
            cld_max: 0.0,
            delta_alpha: 0.0,
            alpha_at_cld_max: 0.0,
            alpha_s: 0.0,
            stall_censored: false,
            failed: true,
        }
    }

    pub fn from_polar(p: &Polar) -> Result<Self> {
        let (cld, alpha_star) = cld_max(p)?;
        let stall = stall_angle(p)?;
        Ok(Self {
            cld_max: cld,
            delta_alpha: (stall.alpha - alpha_star).max(0.0),
            alpha_at_cld_max: alpha_star,
            alpha_s: stall.alpha,
            stall_censored: stall.censored,
            failed: false,
        })
    }
}

/// Evaluate both objectives; every failure becomes [`ObjectivePair::failed`].
pub fn objectives(
    shape: &CollocatedAirfoil,
    flow: &FlowCondition,
    sched: &ScanSchedule,
    eval: &dyn PolarEvaluator,
) -> ObjectivePair {
    evaluate_polar(shape, flow, sched, eval)
        .and_then(|p| ObjectivePair::from_polar(&p))
        .unwrap_or_else(|_| ObjectivePair::failed())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polar(alphas: &[f64], cl: &[f64], cd: &[f64]) -> Polar {
        Polar::new(alphas.iter().zip(cl).zip(cd).map(|((&alpha, &cl), &cd)| PolarRow {
            alpha,
            cl,
            cd,
            converged: true,
        }))
    }

    #[test]
    fn lattice_is_inclusive() {
        let s = ScanSchedule::default();
        let r = s.rough_alphas();
        assert_eq!(r.len(), 31);
        assert_eq!((r[0], r[30]), (-5.0, 25.0));
        assert_eq!(s.fine_alphas(24.0).last(), Some(&25.0));
        assert_eq!(s.fine_alphas(0.0).len(), 17);
    }

    #[test]
    fn polar_sorts_and_dedups() {
        let p = polar(&[5.0, 0.0, 5.0 + 1e-9], &[1.0, 0.0, 2.0], &[0.01; 3]);
        assert_eq!(p.len(), 2);
        assert_eq!(p.rows()[1].cl, 2.0);
    }

    #[test]
    fn stall_ignores_negative_angle_peaks() {
        let p = polar(&[-4.0, -2.0, 0.0, 2.0, 4.0], &[0.3, 0.1, 0.2, 0.4, 0.3], &[0.01; 5]);
        assert_eq!(stall_angle(&p).unwrap(), Stall { alpha: 2.0, censored: false });
    }

    #[test]
    fn failed_pair_is_all_zero() {
        let f = ObjectivePair::failed();
        assert!(f.failed && f.cld_max == 0.0 && f.delta_alpha == 0.0);
    }
}
