#![allow(dead_code)]

use std::path::{Path, PathBuf};

use dbm::geometry::CollocatedAirfoil;
use dbm_cli::config::RunConfig;

pub fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

/// Desk preset with data paths anchored at the workspace and output in `out`.
pub fn desk(out: &Path, overrides: &[&str]) -> RunConfig {
    let o: Vec<String> = overrides.iter().map(ToString::to_string).collect();
    let mut cfg = RunConfig::load(None, Some("desk"), &o).unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg.baselines.manifest = data("baselines/manifest.json");
    cfg.reconstruct.targets = data("uiuc_sample/manifest.json");
    cfg
}

/// All-pairs proper crossing test between non-adjacent contour segments.
pub fn brute_force_crossings(a: &CollocatedAirfoil) -> usize {
    let p = a.points();
    let orient = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        let v = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
        (v > 0.0) as i32 - (v < 0.0) as i32
    };
    let n = p.len() - 1;
    let mut count = 0;
    for i in 0..n {
        for j in i + 2..n {
            let (a0, a1, b0, b1) = (p[i], p[i + 1], p[j], p[j + 1]);
            if orient(a0, a1, b0) * orient(a0, a1, b1) < 0 && orient(b0, b1, a0) * orient(b0, b1, a1) < 0 {
                count += 1;
            }
        }
    }
    count
}
