//! Comparison parameterizations (PARSEC, NURBS, Hicks-Henne) and DbM behind
//! one generator interface, NACA 4-digit base profiles, and the
//! reconstruction driver that fits any generator to a target shape by MAE.

mod hicks_henne;
mod nurbs;
mod parsec;

pub use hicks_henne::{hicks_henne_bump, hicks_henne_generate, HicksHenneParams, HICKS_HENNE_BUMPS};
pub use nurbs::{nurbs_generate, NurbsParams, NurbsSurface, FOLD_TOLERANCE};
pub use parsec::{parsec_generate, ParsecParams};

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evo::{ga_minimize, Bounds, GaConfig};
use crate::geometry::{mae, CollocatedAirfoil, CollocationGrid, RepairConfig};
use crate::morph::{morph, BaselineSet, MorphMode, WeightVector};

/// Lower limit of typical wind-tunnel model tolerance, as an MAE.
pub const KULFAN_FLOOR: f64 = 1.44e-3;

/// MAE below which a reconstruction counts as successful (0.5 %).
pub const RECONSTRUCTION_TOLERANCE: f64 = 5e-3;

/// Score given to candidates the generator cannot build.
pub const FAILURE_PENALTY: f64 = 10.0;

/// Build a shape from one function per surface, each evaluated at the grid's
/// x stations.
pub(crate) fn from_surfaces(
    name: &str,
    grid: CollocationGrid,
    upper: impl Fn(f64) -> f64,
    lower: impl Fn(f64) -> f64,
) -> Result<CollocatedAirfoil> {
    let le = grid.leading_edge();
    let y = (0..grid.len()).map(|i| if i <= le { upper(grid.x(i)) } else { lower(grid.x(i)) }).collect();
    CollocatedAirfoil::new(name, grid, y).map_err(|e| Error::GenerationFailure(e.to_string()))
}

/// Half-thickness of a NACA 4-digit section with a closed trailing edge.
/// The coefficients sum to zero at `x = 1`; that point is pinned so the
/// rounding residue cannot open or cross the trailing edge.
pub(crate) fn naca_thickness(t: f64, x: f64) -> f64 {
    if x >= 1.0 {
        return 0.0;
    }
    5.0 * t * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x.powi(3) - 0.1036 * x.powi(4))
}

fn naca_camber(m: f64, p: f64, x: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else if x < p {
        m / (p * p) * (2.0 * p * x - x * x)
    } else {
        m / ((1.0 - p) * (1.0 - p)) * (1.0 - 2.0 * p + 2.0 * p * x - x * x)
    }
}

/// NACA 4-digit section: `m` maximum camber, `p` its chordwise position, `t`
/// thickness, all as chord fractions.
///
/// The thickness is added vertically to the camber line so every surface
/// point sits exactly on a grid station; with `m = 0` the two surfaces are
/// exact mirrors.
pub fn naca4(m: f64, p: f64, t: f64, grid: CollocationGrid) -> Result<CollocatedAirfoil> {
    if !(t > 0.0 && t < 1.0) || !(0.0..1.0).contains(&m) || (m > 0.0 && !(p > 0.0 && p < 1.0)) {
        return Err(Error::Contract(format!("invalid NACA 4-digit parameters m={m}, p={p}, t={t}")));
    }
    let name = format!("naca{}{}{:02}", (m * 100.0).round(), (p * 10.0).round(), (t * 100.0).round());
    from_surfaces(
        &name,
        grid,
        |x| naca_camber(m, p, x) + naca_thickness(t, x),
        |x| naca_camber(m, p, x) - naca_thickness(t, x),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Parsec,
    Nurbs,
    HicksHenne,
    Dbm,
    DbmI,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Parsec,
        GeneratorKind::Nurbs,
        GeneratorKind::HicksHenne,
        GeneratorKind::Dbm,
        GeneratorKind::DbmI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Parsec => "parsec",
            GeneratorKind::Nurbs => "nurbs",
            GeneratorKind::HicksHenne => "hicks_henne",
            GeneratorKind::Dbm => "dbm",
            GeneratorKind::DbmI => "dbm_i",
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Configuration(format!("unknown generator '{s}'")))
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Parsec,
    Nurbs,
    HicksHenne { exponent: f64 },
    Morph { baselines: Arc<BaselineSet>, repair: Option<RepairConfig> },
}

/// A design-vector to shape mapping with its search box.
#[derive(Debug, Clone)]
pub struct ShapeGenerator {
    kind: GeneratorKind,
    grid: CollocationGrid,
    bounds: Bounds,
    backend: Backend,
}

impl ShapeGenerator {
    pub fn parsec(grid: CollocationGrid) -> Self {
        Self { kind: GeneratorKind::Parsec, grid, bounds: ParsecParams::default_bounds(), backend: Backend::Parsec }
    }

    pub fn nurbs(grid: CollocationGrid) -> Self {
        Self { kind: GeneratorKind::Nurbs, grid, bounds: NurbsParams::default_bounds(), backend: Backend::Nurbs }
    }

    /// Hicks-Henne bumps on NACA 0012 with sine exponent `exponent` (3 by default).
    pub fn hicks_henne(grid: CollocationGrid, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Configuration(format!("Hicks-Henne exponent must be positive, got {exponent}")));
        }
        Ok(Self {
            kind: GeneratorKind::HicksHenne,
            grid,
            bounds: HicksHenneParams::default_bounds(),
            backend: Backend::HicksHenne { exponent },
        })
    }

    /// Morphing over `baselines`; `repair` is applied to every output when set.
    pub fn morphing(baselines: Arc<BaselineSet>, mode: MorphMode, repair: Option<RepairConfig>) -> Self {
        let kind = match mode {
            MorphMode::Dbm => GeneratorKind::Dbm,
            MorphMode::DbmI => GeneratorKind::DbmI,
        };
        Self {
            kind,
            grid: baselines.grid(),
            bounds: vec![mode.bounds(); baselines.len()],
            backend: Backend::Morph { baselines, repair },
        }
    }

    /// Replace the search box; the dimension must not change.
    pub fn with_bounds(mut self, bounds: Bounds) -> Result<Self> {
        if bounds.len() != self.dim() {
            return Err(Error::Configuration(format!(
                "{} takes {} variables, got {} bounds",
                self.kind.name(),
                self.dim(),
                bounds.len()
            )));
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn grid(&self) -> CollocationGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn generate(&self, v: &[f64]) -> Result<CollocatedAirfoil> {
        if v.len() != self.dim() {
            return Err(Error::Contract(format!(
                "{} takes {} variables, got {}",
                self.kind.name(),
                self.dim(),
                v.len()
            )));
        }
        match &self.backend {
            Backend::Parsec => parsec_generate(&ParsecParams::from_slice(v)?, self.grid),
            Backend::Nurbs => nurbs_generate(&NurbsParams::from_slice(v)?, self.grid),
            Backend::HicksHenne { exponent } => {
                hicks_henne_generate(&HicksHenneParams::from_slice(v)?, *exponent, self.grid)
            }
            Backend::Morph { baselines, repair } => morph(baselines, &WeightVector(v.to_vec()), repair.as_ref()),
        }
    }

    /// The design vector that represents NACA 0012: the PARSEC/NURBS fit of
    /// it, zero bumps, or the unit weight on the NACA 0012 baseline (the first
    /// baseline when no baseline carries that name).
    pub fn naca0012_seed(&self) -> Result<Vec<f64>> {
        Ok(match &self.backend {
            Backend::Parsec => ParsecParams::naca0012().to_vec(),
            Backend::Nurbs => NurbsParams::naca0012()?.to_vec(),
            Backend::HicksHenne { .. } => HicksHenneParams::default().to_vec(),
            Backend::Morph { baselines, .. } => {
                let k = baselines
                    .names()
                    .iter()
                    .position(|n| n.replace(char::is_whitespace, "").eq_ignore_ascii_case("naca0012"))
                    .unwrap_or(0);
                WeightVector::unit(baselines.len(), k).0
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub params: Vec<f64>,
    pub mae: f64,
    /// Best-so-far MAE; entry 0 is the initial population.
    pub trace: Vec<f64>,
}

/// Fit `gen` to `target` by minimizing MAE with the single-objective GA.
///
/// The initial population holds the NACA 0012 design plus uniform samples.
/// Candidates the generator rejects score [`FAILURE_PENALTY`]. Unless `cfg`
/// sets its own threshold the run stops once MAE reaches [`KULFAN_FLOOR`].
pub fn reconstruct(target: &CollocatedAirfoil, gen: &ShapeGenerator, cfg: &GaConfig) -> Result<Reconstruction> {
    if target.grid() != gen.grid() {
        return Err(Error::IncompatibleGrid { left: target.grid().intervals(), right: gen.grid().intervals() });
    }
    let cfg = GaConfig { early_stop: cfg.early_stop.or(Some(KULFAN_FLOOR)), ..cfg.clone() };
    let seed = gen.naca0012_seed()?;
    let objective = |v: &[f64]| match gen.generate(v).and_then(|s| mae(&s, target)) {
        Ok(e) if e.is_finite() => e,
        _ => FAILURE_PENALTY,
    };
    let r = ga_minimize(objective, gen.bounds(), &cfg, &[seed])?;
    Ok(Reconstruction { params: r.best.genome, mae: r.best.objectives[0], trace: r.trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naca0012_is_mirror_symmetric() {
        let g = CollocationGrid::new(200).unwrap();
        let a = naca4(0.0, 0.0, 0.12, g).unwrap();
        assert_eq!(a.name, "naca0012");
        for i in 0..=200 {
            assert_eq!(a.y()[i], -a.y()[200 - i]);
        }
    }

    #[test]
    fn naca_names() {
        let g = CollocationGrid::new(20).unwrap();
        assert_eq!(naca4(0.02, 0.4, 0.12, g).unwrap().name, "naca2412");
        assert!(naca4(0.02, 0.0, 0.12, g).is_err());
        assert!(naca4(0.0, 0.0, 0.0, g).is_err());
    }

    #[test]
    fn generator_names_round_trip() {
        for k in GeneratorKind::ALL {
            assert_eq!(k.name().parse::<GeneratorKind>().unwrap(), k);
        }
        assert_eq!("hicks-henne".parse::<GeneratorKind>().unwrap(), GeneratorKind::HicksHenne);
    }

    #[test]
    fn table_dimensions() {
        let g = CollocationGrid::new(100).unwrap();
        assert_eq!(ShapeGenerator::parsec(g).dim(), 12);
        assert_eq!(ShapeGenerator::nurbs(g).dim(), 26);
        assert_eq!(ShapeGenerator::hicks_henne(g, 3.0).unwrap().dim(), 24);
    }
}
