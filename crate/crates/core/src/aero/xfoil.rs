//! Polar evaluation by driving an external XFOIL executable.
//!
//! Each sweep runs in its own process and temporary directory. Coordinates
//! are repaneled here rather than with XFOIL's own paneling. Angles that fail
//! go through a recovery ladder: a fresh single-angle restart, then a retry
//! with more panels. Rows whose inviscid (pressure) drag is not below the
//! viscous drag are treated like non-converged ones.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{alpha_key, FlowCondition, PolarEvaluator, PolarRow};
use crate::error::{Error, Result};
use crate::geometry::CollocatedAirfoil;

/// Environment variable consulted for the XFOIL executable.
pub const XFOIL_ENV: &str = "DBM_XFOIL_BIN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct XfoilConfig {
    /// Executable; falls back to the `DBM_XFOIL_BIN` environment variable.
    pub binary: Option<PathBuf>,
    pub panels: usize,
    pub retry_panels: usize,
    pub timeout_per_angle: f64,
    pub max_iter: usize,
    /// Extra point density per unit of normalized curvature.
    pub curvature_weight: f64,
}

impl Default for XfoilConfig {
    fn default() -> Self {
        Self {
            binary: None,
            panels: 200,
            retry_panels: 250,
            timeout_per_angle: 10.0,
            max_iter: 100,
            curvature_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct XfoilEvaluator {
    cfg: XfoilConfig,
    binary: PathBuf,
}

impl XfoilEvaluator {
    pub fn new(cfg: XfoilConfig) -> Result<Self> {
        let binary =
            cfg.binary.clone().or_else(|| std::env::var_os(XFOIL_ENV).map(PathBuf::from)).ok_or_else(|| {
                Error::Configuration(format!(
                    "no XFOIL executable configured; set {XFOIL_ENV} or the xfoil binary path"
                ))
            })?;
        if !binary.is_file() {
            return Err(Error::Configuration(format!(
                "XFOIL executable {} not found (set {XFOIL_ENV})",
                binary.display()
            )));
        }
        if cfg.panels < 20 || cfg.retry_panels < cfg.panels || !(cfg.timeout_per_angle > 0.0) {
            return Err(Error::Configuration(format!("invalid XFOIL settings {cfg:?}")));
        }
        Ok(Self { cfg, binary })
    }

    pub fn binary(&self) -> &Path {
        &self.binary
    }

    fn sweep(&self, points: &[(f64, f64)], flow: &FlowCondition, alphas: &[f64]) -> Result<Vec<PolarRow>> {
        let dir = tempfile::tempdir()?;
        let mut foil = String::from("dbm\n");
        for (x, y) in points {
            writeln!(foil, "{x:.8} {y:.8}").expect("writing to a String cannot fail");
        }
        std::fs::write(dir.path().join("foil.dat"), foil)?;
        let script = self.script(flow, alphas);
        let timeout = Duration::from_secs_f64(self.cfg.timeout_per_angle * alphas.len().max(1) as f64);
        run_with_timeout(&self.binary, dir.path(), &script, timeout)?;
        let text = std::fs::read_to_string(dir.path().join("polar.txt")).unwrap_or_default();
        let parsed = parse_polar(&text);
        Ok(alphas
            .iter()
            .map(|&a| {
                parsed
                    .iter()
                    .rev()
                    .find(|r| alpha_key(r.alpha) == alpha_key(a) || (r.alpha - a).abs() < 5e-4)
                    .map_or(PolarRow::failed(a), |r| r.to_row(a))
            })
            .collect())
    }

    /// Non-negative angles are swept upwards from the smallest, then the
    /// solution is reset and negative angles are swept downwards, so each
    /// Newton solve starts from a nearby converged one.
    fn script(&self, flow: &FlowCondition, alphas: &[f64]) -> String {
        let mut up: Vec<f64> = alphas.iter().copied().filter(|a| *a >= 0.0).collect();
        let mut down: Vec<f64> = alphas.iter().copied().filter(|a| *a < 0.0).collect();
        up.sort_by(f64::total_cmp);
        down.sort_by(|a, b| b.total_cmp(a));
        let mut s = String::new();
        s.push_str("PLOP\nG\n\nLOAD foil.dat\nOPER\n");
        writeln!(s, "VISC {}", flow.re).unwrap();
        writeln!(s, "MACH {}", flow.mach).unwrap();
        writeln!(s, "VPAR\nN {}\n", flow.n_crit).unwrap();
        writeln!(s, "ITER {}", self.cfg.max_iter).unwrap();
        s.push_str("PACC\npolar.txt\n\n");
        for a in &up {
            writeln!(s, "ALFA {a}").unwrap();
        }
        if !down.is_empty() {
            s.push_str("INIT\n");
            for a in &down {
                writeln!(s, "ALFA {a}").unwrap();
            }
        }
        s.push_str("PACC\n\nQUIT\n");
        s
    }
}

impl PolarEvaluator for XfoilEvaluator {
    fn evaluate(&self, shape: &CollocatedAirfoil, flow: &FlowCondition, alphas: &[f64]) -> Result<Vec<PolarRow>> {
        let base = repanel(shape, self.cfg.panels, self.cfg.curvature_weight)?;
        let mut rows = self.sweep(&base, flow, alphas)?;
        let mut finer: Option<Vec<(f64, f64)>> = None;
        for row in rows.iter_mut().filter(|r| !r.converged) {
            // fresh start from a clean solution at this angle alone
            let retry = self.sweep(&base, flow, &[row.alpha])?.remove(0);
            if retry.converged {
                *row = retry;
                continue;
            }
            if finer.is_none() {
                finer = Some(repanel(shape, self.cfg.retry_panels, self.cfg.curvature_weight)?);
            }
            let retry = self.sweep(finer.as_deref().unwrap_or(&base), flow, &[row.alpha])?.remove(0);
            if retry.converged {
                *row = retry;
            }
        }
        Ok(rows)
    }
}

fn run_with_timeout(binary: &Path, dir: &Path, script: &str, timeout: Duration) -> Result<()> {
    let mut child = Command::new(binary)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::EvaluationFailure(format!("cannot start {}: {e}", binary.display())))?;
    if let Some(mut stdin) = child.stdin.take() {
        // a solver that exits early closes the pipe; its polar file still counts
        let _ = stdin.write_all(script.as_bytes());
    }
    let deadline = Instant::now() + timeout;
    loop {
        if child.try_wait()?.is_some() {
            return Ok(());
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(());
        }
        std::thread::sleep(Duration::from_millis(5));
    }
}

/// One data line of an XFOIL polar file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XfoilRow {
    pub alpha: f64,
    pub cl: f64,
    pub cd: f64,
    /// Pressure (inviscid) drag.
    pub cdp: f64,
}

impl XfoilRow {
    /// The row counts only when the inviscid drag is below the viscous drag.
    pub fn plausible(&self) -> bool {
        self.cd > 0.0 && self.cdp < self.cd && self.cl.is_finite()
    }

    fn to_row(self, alpha: f64) -> PolarRow {
        if self.plausible() {
            PolarRow { alpha, cl: self.cl, cd: self.cd, converged: true }
        } else {
            PolarRow::failed(alpha)
        }
    }
}

/// Data rows after the dashed separator line (`alpha CL CD CDp ...`).
pub fn parse_polar(text: &str) -> Vec<XfoilRow> {
    let mut rows = Vec::new();
    let mut in_table = false;
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with("---") {
            in_table = true;
            continue;
        }
        if !in_table {
            continue;
        }
        let v: Vec<f64> = t.split_whitespace().map_while(|s| s.parse().ok()).collect();
        if v.len() >= 4 {
            rows.push(XfoilRow { alpha: v[0], cl: v[1], cd: v[2], cdp: v[3] });
        }
    }
    rows
}

/// Resample the closed outline (upper trailing edge to lower trailing edge)
/// with `panels` panels, spacing points uniformly in
/// `s + weight * integral(kappa / mean(kappa)) ds`, so that regions of high
/// curvature get more points.
pub fn repanel(shape: &CollocatedAirfoil, panels: usize, weight: f64) -> Result<Vec<(f64, f64)>> {
    let pts: Vec<(f64, f64)> = shape.points();
    let n = pts.len();
    if n < 3 || panels < 2 {
        return Err(Error::DegenerateInput("too few points to repanel".into()));
    }
    let seg: Vec<f64> = pts.windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).collect();
    // turning angle per unit length at interior vertices
    let mut kappa = vec![0.0; n];
    for i in 1..n - 1 {
        let (a, b, c) = (pts[i - 1], pts[i], pts[i + 1]);
        let t1 = (b.1 - a.1).atan2(b.0 - a.0);
        let t2 = (c.1 - b.1).atan2(c.0 - b.0);
        let mut turn = (t2 - t1).abs();
        if turn > std::f64::consts::PI {
            turn = 2.0 * std::f64::consts::PI - turn;
        }
        let len = 0.5 * (seg[i - 1] + seg[i]);
        kappa[i] = if len > 0.0 { turn / len } else { 0.0 };
    }
    let total: f64 = seg.iter().sum();
    let mean_kappa = (0..n - 1).map(|i| 0.5 * (kappa[i] + kappa[i + 1]) * seg[i]).sum::<f64>() / total;
    let scale = if mean_kappa > 0.0 { weight / mean_kappa } else { 0.0 };
    let mut measure = vec![0.0; n];
    for i in 0..n - 1 {
        let density = 1.0 + scale * 0.5 * (kappa[i] + kappa[i + 1]);
        measure[i + 1] = measure[i] + density * seg[i];
    }
    let m_total = measure[n - 1];
    if !(m_total > 0.0) {
        return Err(Error::DegenerateInput("outline has zero length".into()));
    }
    let mut out = Vec::with_capacity(panels + 1);
    let mut k = 0;
    for j in 0..=panels {
        let target = m_total * j as f64 / panels as f64;
        while k < n - 2 && measure[k + 1] < target {
            k += 1;
        }
        let span = measure[k + 1] - measure[k];
        let t = if span > 0.0 { ((target - measure[k]) / span).clamp(0.0, 1.0) } else { 0.0 };
        let (a, b) = (pts[k], pts[k + 1]);
        out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
    }
    out[0] = pts[0];
    out[panels] = pts[n - 1];
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
       XFOIL         Version 6.99

 Calculated polar for: dbm

 xtrf =   1.000 (top)        1.000 (bottom)
 Mach =   0.000     Re =     1.000 e 6     Ncrit =   9.000

   alpha    CL        CD       CDp       CM     Top_Xtr  Bot_Xtr
  ------ -------- --------- --------- -------- -------- --------
   0.000   0.0000   0.00540   0.00104   0.0000   0.5201   0.5201
   5.000   0.5521   0.00690   0.00720   0.0051   0.2701   0.8101
";

    #[test]
    fn parses_rows_and_rejects_inviscid_excess() {
        let rows = parse_polar(SAMPLE);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].plausible());
        assert!(!rows[1].plausible());
    }

    #[test]
    fn missing_binary_names_the_variable() {
        let cfg = XfoilConfig { binary: Some(PathBuf::from("/nonexistent/xfoil")), ..Default::default() };
        let e = XfoilEvaluator::new(cfg).unwrap_err().to_string();
        assert!(e.contains(XFOIL_ENV), "{e}");
    }

    #[test]
    fn script_sweeps_outwards_from_zero() {
        let cfg = XfoilConfig::default();
        let ev = XfoilEvaluator { cfg, binary: PathBuf::from("xfoil") };
        let s = ev.script(&FlowCondition::default(), &[-2.0, 3.0, 0.0, -1.0]);
        let order: Vec<&str> = s.lines().filter(|l| l.starts_with("ALFA") || *l == "INIT").collect();
        assert_eq!(order, ["ALFA 0", "ALFA 3", "INIT", "ALFA -1", "ALFA -2"]);
    }
}
