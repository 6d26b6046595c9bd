//! One function per subcommand. Each validates its whole configuration and
//! inputs first, writes the resolved configuration next to its outputs, then
//! does the work.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use dbm::aero::xfoil::XfoilEvaluator;
use dbm::aero::{evaluate_polar, objectives, ObjectivePair, PolarEvaluator, SyntheticEvaluator};
use dbm::analysis::{
    archive_genomes, assignments_csv, cluster_mean_weights, kmeans, pca, pca_axis_shape, scatter_csv, ClusterMeans,
    PcaResult,
};
use dbm::evo::zdt::{mean_front_deviation, ZdtProblem};
use dbm::evo::{nsga2, GenerationMetrics, ParetoArchive, Sense};
use dbm::geometry::{collocate, find_intersections, load_airfoil, normalize, AirfoilFormat, CollocatedAirfoil};
use dbm::morph::{load_shapes, morph, validate, BaselineSet, ManifestEntry, WeightVector};
use dbm::param::{reconstruct, GeneratorKind, Reconstruction, ShapeGenerator};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{EvaluatorKind, RunConfig};

/// Creates `<out_dir>/<command>` and records the resolved configuration.
fn prepare(cfg: &RunConfig, command: &str) -> Result<PathBuf> {
    let dir = cfg.out_dir.join(command);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    write(&dir.join("config.toml"), &cfg.to_toml()?)?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

/// File-system safe version of a shape name.
pub fn slug(name: &str) -> String {
    let s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    if s.is_empty() {
        "shape".into()
    } else {
        s
    }
}

/// CSV field, quoted when needed.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn load_baselines(cfg: &RunConfig) -> Result<Arc<BaselineSet>> {
    let b = BaselineSet::from_manifest(&cfg.baselines.manifest, cfg.grid()?)
        .with_context(|| format!("loading baselines from {}", cfg.baselines.manifest.display()))?;
    Ok(Arc::new(b))
}

fn evaluator(cfg: &RunConfig) -> Result<Box<dyn PolarEvaluator>> {
    Ok(match cfg.evaluator.kind {
        EvaluatorKind::Synthetic => Box::new(SyntheticEvaluator),
        EvaluatorKind::Xfoil => Box::new(XfoilEvaluator::new(cfg.evaluator.xfoil.clone())?),
    })
}

fn repair(cfg: &RunConfig) -> Option<&dbm::geometry::RepairConfig> {
    cfg.morph.repair.then_some(&cfg.morph.repair_config)
}

/// Reads a coordinate file (Selig or Lednicer) or an already collocated CSV.
fn read_shape(path: &Path, cfg: &RunConfig) -> Result<CollocatedAirfoil> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stem = path.file_stem().map_or_else(|| "shape".into(), |s| s.to_string_lossy().into_owned());
    let grid = cfg.grid()?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let c = CollocatedAirfoil::from_csv(&stem, &text)?;
        ensure!(
            c.grid() == grid,
            "{} is on F = {}, expected {}",
            path.display(),
            c.grid().intervals(),
            grid.intervals()
        );
        return Ok(c);
    }
    let raw = load_airfoil(&text, AirfoilFormat::detect(&text))?;
    let name = if raw.name.trim().is_empty() { stem } else { raw.name.trim().to_string() };
    Ok(collocate(&normalize(&raw)?, grid)?.with_name(name))
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub written: usize,
    pub failed: Vec<(String, String)>,
    pub manifest: PathBuf,
}

/// Normalizes, collocates and checks coordinate files. Each accepted file
/// becomes `shapes/<stem>.csv`; `manifest.json` lists them and can serve as a
/// baseline manifest. Rejected files are reported, never dropped silently.
pub fn ingest(cfg: &RunConfig, files: &[PathBuf]) -> Result<IngestSummary> {
    cfg.validate_paths(&[])?;
    let dir = prepare(cfg, "ingest")?;
    let shapes = dir.join("shapes");
    fs::create_dir_all(&shapes)?;
    let mut manifest = Vec::new();
    let mut failed = Vec::new();
    let mut report = String::from("file,status,message\n");
    for path in files {
        let stem = path.file_stem().map_or_else(|| "shape".into(), |s| slug(&s.to_string_lossy()));
        let outcome = read_shape(path, cfg).and_then(|c| {
            let crossings = find_intersections(&c);
            ensure!(crossings.is_empty(), "contour crosses itself {} times", crossings.len());
            ensure!(
                !manifest.iter().any(|e: &ManifestEntry| e.path == Path::new(&format!("shapes/{stem}.csv"))),
                "duplicate file stem '{stem}'"
            );
            Ok(c)
        });
        let file = path.display().to_string();
        match outcome {
            Ok(c) => {
                let rel = format!("shapes/{stem}.csv");
                write(&dir.join(&rel), &c.to_csv())?;
                let _ = writeln!(report, "{},ok,", field(&file));
                manifest.push(ManifestEntry { name: c.name.clone(), path: rel.into() });
            }
            Err(e) => {
                let msg = format!("{e:#}");
                let _ = writeln!(report, "{},rejected,{}", field(&file), field(&msg));
                failed.push((file, msg));
            }
        }
    }
    let manifest_path = dir.join("manifest.json");
    write_json(&manifest_path, &manifest)?;
    write(&dir.join("ingest_report.csv"), &report)?;
    Ok(IngestSummary { written: manifest.len(), failed, manifest: manifest_path })
}

#[derive(Debug, Clone, Serialize)]
pub struct MorphSummary {
    pub rows: usize,
    pub written: usize,
    pub repaired: usize,
    pub rejected: Vec<(usize, String)>,
}

/// Morphs every row of a weights file (comma separated, one weight per
/// baseline in manifest order; blank lines and `#` comments are skipped).
/// Row `k` (1-based) is written to `shapes/row_<k>.csv`.
pub fn morph_rows(cfg: &RunConfig, weights: &Path) -> Result<MorphSummary> {
    cfg.validate_paths(&[&cfg.baselines.manifest, weights])?;
    let b = load_baselines(cfg)?;
    let text = fs::read_to_string(weights).with_context(|| format!("reading {}", weights.display()))?;
    let dir = prepare(cfg, "morph")?;
    let shapes = dir.join("shapes");
    fs::create_dir_all(&shapes)?;
    let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();

    let mut report = String::from("row,status,repaired,message\n");
    let mut summary = MorphSummary { rows: rows.len(), written: 0, repaired: 0, rejected: Vec::new() };
    for (k, line) in rows.iter().enumerate() {
        let row = k + 1;
        let outcome = (|| -> Result<(CollocatedAirfoil, bool)> {
            let w = WeightVector::from_csv_row(line)?;
            ensure!(w.len() == b.len(), "{} weights for {} baselines", w.len(), b.len());
            let violations = validate(&w, cfg.morph.mode);
            if !violations.is_empty() {
                let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
                bail!("{}", msgs.join("; "));
            }
            let crossed = cfg.morph.repair && !find_intersections(&b.blend(&w)?).is_empty();
            Ok((morph(&b, &w, repair(cfg))?.with_name(format!("row {row}")), crossed))
        })();
        match outcome {
            Ok((shape, crossed)) => {
                write(&shapes.join(format!("row_{row:04}.csv")), &shape.to_csv())?;
                summary.written += 1;
                summary.repaired += usize::from(crossed);
                let _ = writeln!(report, "{row},ok,{crossed},");
            }
            Err(e) => {
                let msg = format!("{e:#}");
                let _ = writeln!(report, "{row},rejected,false,{}", field(&msg));
                summary.rejected.push((row, msg));
            }
        }
    }
    write(&dir.join("morph_report.csv"), &report)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub generation: usize,
    pub within: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub targets: usize,
    pub within: usize,
    pub percent: f64,
    pub tolerance: f64,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructSummary {
    pub methods: Vec<MethodSummary>,
}

impl ReconstructSummary {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == name)
    }
}

fn generator(cfg: &RunConfig, kind: GeneratorKind, b: &Arc<BaselineSet>) -> Result<ShapeGenerator> {
    let grid = cfg.grid()?;
    let fix = cfg.reconstruct.repair.then_some(cfg.morph.repair_config);
    Ok(match kind {
        GeneratorKind::Parsec => ShapeGenerator::parsec(grid),
        GeneratorKind::Nurbs => ShapeGenerator::nurbs(grid),
        GeneratorKind::HicksHenne => ShapeGenerator::hicks_henne(grid, cfg.reconstruct.hicks_henne_exponent)?,
        GeneratorKind::Dbm => ShapeGenerator::morphing(b.clone(), dbm::morph::MorphMode::Dbm, fix),
        GeneratorKind::DbmI => ShapeGenerator::morphing(b.clone(), dbm::morph::MorphMode::DbmI, fix),
    })
}

/// Fits every target with every configured method. Target `k` uses GA seed
/// `reconstruct.ga.seed + k`. A target counts as reconstructed once its MAE
/// is at or below `reconstruct.tolerance`.
pub fn reconstruct_targets(cfg: &RunConfig) -> Result<ReconstructSummary> {
    cfg.validate_paths(&[&cfg.baselines.manifest, &cfg.reconstruct.targets])?;
    let methods = cfg.methods()?;
    let b = load_baselines(cfg)?;
    let targets = load_shapes(&cfg.reconstruct.targets, cfg.grid()?)
        .with_context(|| format!("loading targets from {}", cfg.reconstruct.targets.display()))?;
    ensure!(!targets.is_empty(), "no reconstruction targets");
    let generators = methods.iter().map(|&k| generator(cfg, k, &b)).collect::<Result<Vec<_>>>()?;
    let dir = prepare(cfg, "reconstruct")?;

    let tolerance = cfg.reconstruct.tolerance;
    let mut csv = String::from("airfoil,method,generation,best_mae\n");
    let mut params = String::from("airfoil,method,mae,params\n");
    let mut summaries = Vec::new();
    for (kind, gen) in methods.iter().zip(&generators) {
        let runs: Vec<Reconstruction> = targets
            .par_iter()
            .enumerate()
            .map(|(k, t)| {
                let ga = dbm::evo::GaConfig { seed: cfg.reconstruct.ga.seed + k as u64, ..cfg.reconstruct.ga.clone() };
                reconstruct(t, gen, &ga)
            })
            .collect::<dbm::Result<_>>()?;
        for (t, r) in targets.iter().zip(&runs) {
            for (g, v) in r.trace.iter().enumerate() {
                let _ = writeln!(csv, "{},{},{g},{v}", field(&t.name), kind.name());
            }
            let p: Vec<String> = r.params.iter().map(ToString::to_string).collect();
            let _ = writeln!(params, "{},{},{},{}", field(&t.name), kind.name(), r.mae, field(&p.join(" ")));
        }
        let last = cfg.reconstruct.ga.max_generations;
        let mut gens: Vec<usize> = (0..=last).step_by(10).collect();
        if gens.last() != Some(&last) {
            gens.push(last);
        }
        let checkpoints = gens
            .into_iter()
            .map(|g| {
                // a run that stopped early keeps its final value
                let within = runs.iter().filter(|r| r.trace[g.min(r.trace.len() - 1)] <= tolerance).count();
                Checkpoint { generation: g, within, percent: 100.0 * within as f64 / runs.len() as f64 }
            })
            .collect();
        let within = runs.iter().filter(|r| r.mae <= tolerance).count();
        summaries.push(MethodSummary {
            method: kind.name().into(),
            targets: runs.len(),
            within,
            percent: 100.0 * within as f64 / runs.len() as f64,
            tolerance,
            checkpoints,
        });
    }
    write(&dir.join("reconstruction.csv"), &csv)?;
    write(&dir.join("params.csv"), &params)?;
    let summary = ReconstructSummary { methods: summaries };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeSummary {
    pub archive_size: usize,
    pub generations: usize,
    pub seeds: Vec<String>,
    pub final_hypervolume: Option<f64>,
    pub archive: PathBuf,
}

fn metrics_csv(history: &[GenerationMetrics]) -> String {
    let mut s = String::from("generation,front_size,best_cld_max,best_delta_alpha,hypervolume,archive_consistent\n");
    for m in history {
        let hv = m.hypervolume.map_or_else(String::new, |v| v.to_string());
        let _ =
            writeln!(s, "{},{},{},{},{hv},{}", m.generation, m.front_size, m.best[0], m.best[1], m.archive_consistent);
    }
    s
}

/// Maximizes (CLD_max, delta-alpha) over the morphing weights with NSGA-II.
/// Shapes that fail to morph, repair or evaluate score (0, 0).
pub fn optimize(cfg: &RunConfig) -> Result<OptimizeSummary> {
    cfg.validate_paths(&[&cfg.baselines.manifest])?;
    let eval = evaluator(cfg)?;
    let b = load_baselines(cfg)?;
    let dir = prepare(cfg, "optimize")?;
    let (flow, scan) = (&cfg.evaluator.flow, &cfg.evaluator.scan);
    let score = |w: &WeightVector| -> ObjectivePair {
        match morph(&b, w, repair(cfg)) {
            Ok(s) => objectives(&s, flow, scan, eval.as_ref()),
            Err(_) => ObjectivePair::failed(),
        }
    };

    let mut seeds: Vec<Vec<f64>> = Vec::new();
    let mut seed_names = Vec::new();
    if cfg.optimize.seed_with_baselines {
        let scores: Vec<ObjectivePair> =
            (0..b.len()).into_par_iter().map(|k| score(&WeightVector::unit(b.len(), k))).collect();
        let best = |key: fn(&ObjectivePair) -> f64| {
            // first maximum wins
            (0..scores.len()).fold(0, |acc, k| if key(&scores[k]) > key(&scores[acc]) { k } else { acc })
        };
        for k in [best(|p| p.cld_max), best(|p| p.delta_alpha)] {
            let w = WeightVector::unit(b.len(), k).0;
            if !seeds.contains(&w) {
                seeds.push(w);
                seed_names.push(b.shapes()[k].name.clone());
            }
        }
    }

    let (lo, hi) = cfg.morph.mode.bounds();
    let bounds = vec![(lo, hi); b.len()];
    let objective = |g: &[f64]| {
        let p = score(&WeightVector(g.to_vec()));
        vec![p.cld_max, p.delta_alpha]
    };
    let run = nsga2(
        objective,
        &bounds,
        &cfg.optimize.ga,
        Sense::Maximize,
        &seeds,
        Some(cfg.optimize.hv_reference),
        cfg.optimize.dedup_tolerance,
    )?;

    let mut archive = run.archive.clone();
    archive
        .members
        .sort_by(|a, c| a.objectives[0].total_cmp(&c.objectives[0]).then(a.objectives[1].total_cmp(&c.objectives[1])));
    let shapes = dir.join("shapes");
    fs::create_dir_all(&shapes)?;
    let mut csv = String::from("index,cld_max,delta_alpha");
    for n in b.names() {
        csv.push(',');
        csv.push_str(&field(n));
    }
    csv.push('\n');
    for (i, m) in archive.members.iter().enumerate() {
        let w: Vec<String> = m.genome.iter().map(ToString::to_string).collect();
        let _ = writeln!(csv, "{i},{},{},{}", m.objectives[0], m.objectives[1], w.join(","));
        if let Ok(s) = morph(&b, &WeightVector(m.genome.clone()), repair(cfg)) {
            write(&shapes.join(format!("member_{i:03}.csv")), &s.with_name(format!("member {i}")).to_csv())?;
        }
    }
    write(&dir.join("archive.csv"), &csv)?;
    let archive_path = dir.join("archive.json");
    write_json(&archive_path, &archive)?;
    write(&dir.join("metrics.csv"), &metrics_csv(&run.history))?;
    Ok(OptimizeSummary {
        archive_size: archive.len(),
        generations: run.history.len().saturating_sub(1),
        seeds: seed_names,
        final_hypervolume: run.history.last().and_then(|m| m.hypervolume),
        archive: archive_path,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZdtOutcome {
    pub problem: String,
    pub front_size: usize,
    pub deviation: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn zdt_threshold(p: ZdtProblem) -> f64 {
    match p {
        ZdtProblem::Zdt4 => 0.02,
        ZdtProblem::Zdt6 => 0.05,
        _ => 0.01,
    }
}

/// Runs NSGA-II on each configured ZDT problem and compares the final
/// archive to the analytic front.
pub fn benchmark_zdt(cfg: &RunConfig) -> Result<Vec<ZdtOutcome>> {
    cfg.validate_paths(&[])?;
    let problems = cfg.zdt_problems()?;
    let dir = prepare(cfg, "zdt")?;
    let mut out = Vec::new();
    for p in problems {
        let f = move |w: &[f64]| p.evaluate(w).map_or_else(|_| vec![f64::INFINITY; 2], |(a, b)| vec![a, b]);
        let run = nsga2(
            f,
            &p.bounds(cfg.zdt.dimension),
            &cfg.zdt.ga,
            Sense::Minimize,
            &[],
            Some([11.0, 11.0]),
            dbm::evo::DEFAULT_DEDUP_TOLERANCE,
        )?;
        let mut pts: Vec<Vec<f64>> = run.archive.members.iter().map(|m| m.objectives.clone()).collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut csv = String::from("f1,f2,front_f2\n");
        for q in &pts {
            let _ = writeln!(csv, "{},{},{}", q[0], q[1], p.front(q[0]));
        }
        write(&dir.join(format!("{}_front.csv", p.name())), &csv)?;
        write(&dir.join(format!("{}_metrics.csv", p.name())), &zdt_metrics_csv(&run.history))?;
        let deviation = mean_front_deviation(p, &pts);
        let threshold = zdt_threshold(p);
        out.push(ZdtOutcome {
            problem: p.name().into(),
            front_size: pts.len(),
            deviation,
            threshold,
            passed: deviation <= threshold,
        });
    }
    write_json(&dir.join("summary.json"), &out)?;
    Ok(out)
}

fn zdt_metrics_csv(history: &[GenerationMetrics]) -> String {
    let mut s = String::from("generation,front_size,best_f1,best_f2,hypervolume\n");
    for m in history {
        let hv = m.hypervolume.map_or_else(String::new, |v| v.to_string());
        let _ = writeln!(s, "{},{},{},{},{hv}", m.generation, m.front_size, m.best[0], m.best[1]);
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    pub points: usize,
    pub sizes: Vec<usize>,
    pub explained_variance_ratio: Option<Vec<f64>>,
    pub shape_failures: Vec<String>,
}

#[derive(Serialize)]
struct PcaReport<'a> {
    pca: &'a PcaResult,
    means: &'a ClusterMeans,
    inertia: f64,
}

/// PCA and k-means over the weight vectors of a saved archive, plus shapes
/// along the leading axes and at each cluster mean.
pub fn cluster(cfg: &RunConfig, archive: &Path) -> Result<ClusterSummary> {
    cfg.validate_paths(&[&cfg.baselines.manifest, archive])?;
    let text = fs::read_to_string(archive).with_context(|| format!("reading {}", archive.display()))?;
    let a: ParetoArchive = serde_json::from_str(&text).with_context(|| format!("parsing {}", archive.display()))?;
    let b = load_baselines(cfg)?;
    let pts = archive_genomes(&a);
    ensure!(pts.iter().all(|p| p.len() == b.len()), "archive genomes do not match the {} baselines", b.len());
    let result = pca(&pts)?;
    let clusters = kmeans(&pts, cfg.cluster.k, cfg.cluster.seed)?;
    let means = cluster_mean_weights(&a, &clusters)?;
    let dir = prepare(cfg, "cluster")?;
    let shapes = dir.join("shapes");
    fs::create_dir_all(&shapes)?;

    let mut failures = Vec::new();
    for axis in 0..cfg.cluster.axes.min(result.dim()) {
        for &s in &cfg.cluster.scales {
            let name = format!("pca{}_{s}", axis + 1);
            match pca_axis_shape(&b, &result, axis, s, repair(cfg)) {
                Ok(shape) => write(&shapes.join(format!("{}.csv", slug(&name))), &shape.to_csv())?,
                Err(e) => failures.push(format!("{name}: {e}")),
            }
        }
    }
    let mut csv = String::from("cluster,size");
    for n in b.names() {
        csv.push(',');
        csv.push_str(&field(n));
    }
    csv.push('\n');
    let rows = means.clusters.iter().enumerate().map(|(k, m)| (k.to_string(), means.sizes[k], m.as_ref()));
    for (label, size, m) in rows.chain(std::iter::once(("total".to_string(), pts.len(), Some(&means.total)))) {
        let Some(m) = m else {
            let _ = writeln!(csv, "{label},0{}", ",".repeat(b.len()));
            continue;
        };
        let w: Vec<String> = m.iter().map(ToString::to_string).collect();
        let _ = writeln!(csv, "{label},{size},{}", w.join(","));
        let name = format!("cluster_{label}");
        match morph(&b, &WeightVector(m.clone()), repair(cfg)) {
            Ok(shape) => write(&shapes.join(format!("{name}.csv")), &shape.with_name(name).to_csv())?,
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    write(&dir.join("cluster_means.csv"), &csv)?;
    write(&dir.join("assignments.csv"), &assignments_csv(&clusters))?;
    write(&dir.join("scatter.csv"), &scatter_csv(&result, &pts, &clusters))?;
    write_json(&dir.join("pca.json"), &PcaReport { pca: &result, means: &means, inertia: clusters.inertia })?;
    if !failures.is_empty() {
        write(&dir.join("shape_failures.txt"), &(failures.join("\n") + "\n"))?;
    }
    Ok(ClusterSummary {
        points: pts.len(),
        sizes: means.sizes.clone(),
        explained_variance_ratio: result.explained_variance_ratio.clone(),
        shape_failures: failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluatedShape {
    pub name: String,
    pub objectives: ObjectivePair,
}

/// Objectives and polars for the given files, or for every baseline when no
/// file is given.
pub fn evaluate(cfg: &RunConfig, files: &[PathBuf]) -> Result<Vec<EvaluatedShape>> {
    let paths: Vec<&Path> = files.iter().map(PathBuf::as_path).collect();
    cfg.validate_paths(&paths)?;
    let eval = evaluator(cfg)?;
    let shapes: Vec<CollocatedAirfoil> = if files.is_empty() {
        ensure!(cfg.baselines.manifest.exists(), "{} does not exist", cfg.baselines.manifest.display());
        load_baselines(cfg)?.shapes().to_vec()
    } else {
        files.iter().map(|f| read_shape(f, cfg)).collect::<Result<_>>()?
    };
    let dir = prepare(cfg, "evaluate")?;
    let polars = dir.join("polars");
    fs::create_dir_all(&polars)?;
    let (flow, scan) = (&cfg.evaluator.flow, &cfg.evaluator.scan);
    let results: Vec<(EvaluatedShape, Option<String>)> = shapes
        .par_iter()
        .map(|s| {
            let polar = evaluate_polar(s, flow, scan, eval.as_ref());
            let objectives = polar
                .as_ref()
                .ok()
                .and_then(|p| ObjectivePair::from_polar(p).ok())
                .unwrap_or_else(ObjectivePair::failed);
            (EvaluatedShape { name: s.name.clone(), objectives }, polar.ok().map(|p| p.to_csv()))
        })
        .collect();
    let mut csv = String::from("name,cld_max,alpha_at_cld_max,alpha_s,delta_alpha,stall_censored,failed\n");
    let mut out = Vec::new();
    for (k, (e, polar)) in results.into_iter().enumerate() {
        let o = &e.objectives;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            field(&e.name),
            o.cld_max,
            o.alpha_at_cld_max,
            o.alpha_s,
            o.delta_alpha,
            o.stall_censored,
            o.failed
        );
        if let Some(p) = polar {
            write(&polars.join(format!("{k:03}_{}.csv", slug(&e.name))), &p)?;
        }
        out.push(e);
    }
    write(&dir.join("objectives.csv"), &csv)?;
    Ok(out)
}
