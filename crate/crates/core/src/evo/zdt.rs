//! The ZDT bi-objective test problems (both objectives minimized).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Bounds;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZdtProblem {
    Zdt1,
    Zdt2,
    Zdt4,
    Zdt6,
}

impl ZdtProblem {
    pub const ALL: [ZdtProblem; 4] = [ZdtProblem::Zdt1, ZdtProblem::Zdt2, ZdtProblem::Zdt4, ZdtProblem::Zdt6];

    pub fn name(self) -> &'static str {
        match self {
            ZdtProblem::Zdt1 => "zdt1",
            ZdtProblem::Zdt2 => "zdt2",
            ZdtProblem::Zdt4 => "zdt4",
            ZdtProblem::Zdt6 => "zdt6",
        }
    }

    pub fn bounds(self, n: usize) -> Bounds {
        match self {
            ZdtProblem::Zdt4 => std::iter::once((0.0, 1.0)).chain(std::iter::repeat_n((-5.0, 5.0), n - 1)).collect(),
            _ => vec![(0.0, 1.0); n],
        }
    }

    /// The optimal front `f2*(f1)` (where `g = 1`).
    pub fn front(self, f1: f64) -> f64 {
        match self {
            ZdtProblem::Zdt1 | ZdtProblem::Zdt4 => 1.0 - f1.sqrt(),
            ZdtProblem::Zdt2 | ZdtProblem::Zdt6 => 1.0 - f1 * f1,
        }
    }

    /// Evaluate `(f1, f2)`; `w` must lie in the problem's box.
    pub fn evaluate(self, w: &[f64]) -> Result<(f64, f64)> {
        let n = w.len();
        if n < 2 {
            return Err(Error::Contract("ZDT problems need at least 2 variables".into()));
        }
        for (i, (&v, (lo, hi))) in w.iter().zip(self.bounds(n)).enumerate() {
            if !(lo..=hi).contains(&v) {
                return Err(Error::Contract(format!("w[{i}] = {v} outside [{lo}, {hi}]")));
            }
        }
        Ok(self.evaluate_unchecked(w))
    }

    pub(crate) fn evaluate_unchecked(self, w: &[f64]) -> (f64, f64) {
        let n = w.len();
        let tail = &w[1..];
        let mean = tail.iter().sum::<f64>() / (n - 1) as f64;
        let f1 = match self {
            ZdtProblem::Zdt6 => 1.0 - (-4.0 * w[0]).exp() * (6.0 * PI * w[0]).sin().powi(6),
            _ => w[0],
        };
        let g = match self {
            ZdtProblem::Zdt1 | ZdtProblem::Zdt2 => 1.0 + 9.0 * mean,
            ZdtProblem::Zdt4 => {
                10.0 * n as f64 + tail.iter().map(|v| v * v - 10.0 * (4.0 * PI * v).cos()).sum::<f64>() - 9.0
            }
            ZdtProblem::Zdt6 => 1.0 + 9.0 * mean.powf(0.25),
        };
        let ratio = f1 / g;
        let f2 = match self {
            ZdtProblem::Zdt1 | ZdtProblem::Zdt4 => g * (1.0 - ratio.sqrt()),
            ZdtProblem::Zdt2 | ZdtProblem::Zdt6 => g * (1.0 - ratio * ratio),
        };
        (f1, f2)
    }
}

impl std::str::FromStr for ZdtProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ZdtProblem::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Configuration(format!("unknown ZDT problem '{s}'")))
    }
}

/// Evaluate a ZDT problem at `w`.
pub fn zdt(problem: ZdtProblem, w: &[f64]) -> Result<(f64, f64)> {
    problem.evaluate(w)
}

/// Mean of `|f2 - f2*(f1)|` over a set of objective points.
pub fn mean_front_deviation(problem: ZdtProblem, points: &[Vec<f64>]) -> f64 {
    if points.is_empty() {
        return f64::INFINITY;
    }
    points.iter().map(|p| (p[1] - problem.front(p[0])).abs()).sum::<f64>() / points.len() as f64
}
