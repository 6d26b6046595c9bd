//! Run configuration: a preset, overlaid by a TOML file, overlaid by
//! `key.path=value` overrides from the command line.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use dbm::aero::{FlowCondition, ScanSchedule, XfoilConfig};
use dbm::evo::zdt::ZdtProblem;
use dbm::evo::GaConfig;
use dbm::geometry::{CollocationGrid, RepairConfig};
use dbm::morph::MorphMode;
use dbm::param::GeneratorKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Every command writes below this directory.
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub baselines: BaselineConfig,
    pub morph: MorphConfig,
    pub evaluator: EvaluatorConfig,
    pub reconstruct: ReconstructConfig,
    pub optimize: OptimizeConfig,
    pub zdt: ZdtConfig,
    pub cluster: ClusterConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    pub manifest: PathBuf,
    /// Number of grid intervals `F`.
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphConfig {
    pub mode: MorphMode,
    pub repair: bool,
    pub repair_config: RepairConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvaluatorKind {
    Synthetic,
    Xfoil,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluatorConfig {
    pub kind: EvaluatorKind,
    pub flow: FlowCondition,
    pub scan: ScanSchedule,
    pub xfoil: XfoilConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    pub targets: PathBuf,
    pub methods: Vec<String>,
    /// Target `k` runs with seed `ga.seed + k`.
    pub ga: GaConfig,
    /// MAE at or below which a target counts as reconstructed.
    pub tolerance: f64,
    /// Repair intersecting morphs while reconstructing.
    pub repair: bool,
    pub hicks_henne_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub ga: GaConfig,
    pub dedup_tolerance: f64,
    /// Hypervolume reference point in (CLD_max, delta-alpha).
    pub hv_reference: [f64; 2],
    /// Put the baselines that score best on each objective in the first
    /// population.
    pub seed_with_baselines: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZdtConfig {
    pub ga: GaConfig,
    pub dimension: usize,
    pub problems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    pub k: usize,
    pub seed: u64,
    /// Leading PCA axes exported as shapes.
    pub axes: usize,
    pub scales: Vec<f64>,
}

pub const PRESETS: [&str; 2] = ["desk", "paper-recon"];

fn ga(population: usize, max_generations: usize) -> GaConfig {
    GaConfig { population, max_generations, ..GaConfig::default() }
}

impl RunConfig {
    /// Named profile; `desk` runs on a workstation in minutes, `paper-recon`
    /// uses the full reconstruction population, generation cap and grid.
    pub fn preset(name: &str) -> Result<Self> {
        let mut cfg = Self::desk();
        match name {
            "desk" => {}
            "paper-recon" => {
                cfg.baselines.grid = 4000;
                cfg.reconstruct.ga.population = 100;
                cfg.reconstruct.ga.max_generations = 500;
            }
            other => bail!("unknown preset '{other}', expected one of {PRESETS:?}"),
        }
        Ok(cfg)
    }

    fn desk() -> Self {
        Self {
            out_dir: PathBuf::from("runs"),
            threads: 0,
            baselines: BaselineConfig { manifest: PathBuf::from("data/baselines/manifest.json"), grid: 400 },
            morph: MorphConfig { mode: MorphMode::Dbm, repair: true, repair_config: RepairConfig::default() },
            evaluator: EvaluatorConfig {
                kind: EvaluatorKind::Synthetic,
                flow: FlowCondition::default(),
                scan: ScanSchedule::default(),
                xfoil: XfoilConfig::default(),
            },
            reconstruct: ReconstructConfig {
                targets: PathBuf::from("data/uiuc_sample/manifest.json"),
                methods: vec!["dbm".into(), "dbm_i".into()],
                ga: GaConfig { mutation_rate: Some(0.12), ..ga(40, 100) },
                tolerance: 5e-3,
                repair: false,
                hicks_henne_exponent: 3.0,
            },
            optimize: OptimizeConfig {
                ga: ga(40, 100),
                dedup_tolerance: 1e-9,
                hv_reference: [0.0, 0.0],
                seed_with_baselines: true,
            },
            zdt: ZdtConfig {
                ga: ga(100, 500),
                dimension: 25,
                problems: ZdtProblem::ALL.iter().map(|p| p.name().to_string()).collect(),
            },
            cluster: ClusterConfig { k: 3, seed: 0, axes: 2, scales: vec![-1.0, -0.5, 0.0, 0.5, 1.0] },
        }
    }

    /// Resolve a configuration: the preset (from `preset`, else the file's
    /// `preset` key, else `desk`), then the file, then each `key=value`.
    pub fn load(file: Option<&Path>, preset: Option<&str>, overrides: &[String]) -> Result<Self> {
        let mut layer = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                text.parse::<toml::Table>().with_context(|| format!("parsing {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        let file_preset = match layer.remove("preset") {
            Some(toml::Value::String(s)) => Some(s),
            Some(other) => bail!("preset must be a string, got {other}"),
            None => None,
        };
        let name = preset.map(str::to_string).or(file_preset).unwrap_or_else(|| "desk".into());
        let mut merged = toml::Table::try_from(Self::preset(&name)?)?;
        merge(&mut merged, layer);
        for o in overrides {
            merge(&mut merged, parse_override(o)?);
        }
        let cfg: Self = toml::Value::Table(merged).try_into().context("invalid configuration")?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<CollocationGrid> {
        Ok(CollocationGrid::new(self.baselines.grid)?)
    }

    pub fn methods(&self) -> Result<Vec<GeneratorKind>> {
        self.reconstruct.methods.iter().map(|m| Ok(m.parse::<GeneratorKind>()?)).collect()
    }

    pub fn zdt_problems(&self) -> Result<Vec<ZdtProblem>> {
        self.zdt.problems.iter().map(|p| Ok(p.parse::<ZdtProblem>()?)).collect()
    }

    /// Checks every knob without touching the file system.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.morph.repair_config.validate()?;
        self.evaluator.flow.validate()?;
        self.evaluator.scan.validate()?;
        for g in [&self.reconstruct.ga, &self.optimize.ga, &self.zdt.ga] {
            g.validate()?;
        }
        ensure!(!self.methods()?.is_empty(), "reconstruct.methods is empty");
        ensure!(self.reconstruct.tolerance > 0.0, "reconstruct.tolerance must be positive");
        ensure!(self.reconstruct.hicks_henne_exponent > 0.0, "hicks_henne_exponent must be positive");
        ensure!(self.optimize.dedup_tolerance >= 0.0, "dedup_tolerance must be non-negative");
        ensure!(self.zdt.dimension >= 2, "zdt.dimension must be at least 2");
        self.zdt_problems()?;
        ensure!(self.cluster.k >= 1, "cluster.k must be at least 1");
        ensure!(self.cluster.scales.iter().all(|s| s.is_finite()), "cluster.scales must be finite");
        Ok(())
    }

    /// [`validate`](Self::validate) plus existence of the input files a
    /// command reads.
    pub fn validate_paths(&self, paths: &[&Path]) -> Result<()> {
        self.validate()?;
        for p in paths {
            ensure!(p.exists(), "{} does not exist", p.display());
        }
        Ok(())
    }

    /// Set every seed at once.
    pub fn set_seed(&mut self, seed: u64) {
        self.reconstruct.ga.seed = seed;
        self.optimize.ga.seed = seed;
        self.zdt.ga.seed = seed;
        self.cluster.seed = seed;
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

fn merge(base: &mut toml::Table, layer: toml::Table) {
    for (k, v) in layer {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(l)) => merge(b, l),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// `a.b.c=value`, where `value` is a TOML literal or else a bare string.
fn parse_override(s: &str) -> Result<toml::Table> {
    let (path, raw) = s.split_once('=').with_context(|| format!("override '{s}' is not key=value"))?;
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut keys: Vec<&str> = path.trim().split('.').collect();
    ensure!(keys.iter().all(|k| !k.is_empty()), "bad key path '{path}'");
    let last = keys.pop().unwrap_or_default();
    let mut table = toml::Table::new();
    table.insert(last.to_string(), value);
    for k in keys.into_iter().rev() {
        let mut outer = toml::Table::new();
        outer.insert(k.to_string(), toml::Value::Table(table));
        table = outer;
    }
    Ok(table)
}
