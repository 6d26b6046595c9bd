use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CollocatedAirfoil, CollocationGrid, RawAirfoil};
use crate::error::{Error, Result};

/// Coordinate file layouts found in the UIUC database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AirfoilFormat {
    /// Optional name line, then one contour from the upper trailing edge
    /// round the leading edge to the lower trailing edge.
    Selig,
    /// Name line, a line with the two surface point counts, then each
    /// surface listed from leading edge to trailing edge.
    Lednicer,
}

impl AirfoilFormat {
    /// Lednicer files carry point counts (> 1) where Selig files carry the
    /// first coordinate pair.
    pub fn detect(text: &str) -> Self {
        let mut numeric = text.lines().map(str::trim).filter(|l| !l.is_empty()).filter_map(|l| parse_pair(l).ok());
        match numeric.next() {
            Some((a, b)) if a > 1.5 && b > 1.5 => AirfoilFormat::Lednicer,
            _ => AirfoilFormat::Selig,
        }
    }
}

fn parse_pair(line: &str) -> std::result::Result<(f64, f64), String> {
    let mut it = line.split_whitespace();
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(format!("expected two numbers, found '{line}'"));
    };
    let x = a.parse::<f64>().map_err(|_| format!("'{a}' is not a number"))?;
    let y = b.parse::<f64>().map_err(|_| format!("'{b}' is not a number"))?;
    Ok((x, y))
}

/// Parse a coordinate file into a [`RawAirfoil`] in contour order.
pub fn load_airfoil(text: &str, format: AirfoilFormat) -> Result<RawAirfoil> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty()).peekable();

    // A first line that does not parse as a pair is the name.
    let mut name = String::new();
    if let Some(&(_, first)) = lines.peek() {
        if parse_pair(first).is_err() {
            name = first.to_string();
            lines.next();
        }
    }

    let mut pairs = Vec::new();
    for (lineno, line) in lines {
        let p = parse_pair(line).map_err(|message| Error::Parse { line: lineno, message })?;
        pairs.push((lineno, p));
    }

    let points = match format {
        AirfoilFormat::Selig => pairs.into_iter().map(|(_, p)| p).collect(),
        AirfoilFormat::Lednicer => restitch_lednicer(pairs)?,
    };
    RawAirfoil::new(name, points)
}

fn restitch_lednicer(pairs: Vec<(usize, (f64, f64))>) -> Result<Vec<(f64, f64)>> {
    let Some(&(lineno, (nu, nl))) = pairs.first() else {
        return Err(Error::DegenerateInput("empty Lednicer file".into()));
    };
    let (nu, nl) = (nu.round() as usize, nl.round() as usize);
    let body: Vec<(f64, f64)> = pairs[1..].iter().map(|(_, p)| *p).collect();
    if body.len() != nu + nl {
        return Err(Error::Parse {
            line: lineno,
            message: format!("header announces {nu} + {nl} points, file has {}", body.len()),
        });
    }
    let (upper, lower) = body.split_at(nu);
    let mut points: Vec<(f64, f64)> = upper.iter().rev().copied().collect();
    let skip = usize::from(matches!((upper.first(), lower.first()), (Some(a), Some(b)) if a == b));
    points.extend_from_slice(&lower[skip..]);
    Ok(points)
}

/// Serialized form of a collocated shape: `{name, F, y}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollocatedRecord {
    pub name: String,
    #[serde(rename = "F")]
    pub f: usize,
    pub y: Vec<f64>,
}

impl From<&CollocatedAirfoil> for CollocatedRecord {
    fn from(a: &CollocatedAirfoil) -> Self {
        Self { name: a.name.clone(), f: a.grid().intervals(), y: a.y().to_vec() }
    }
}

impl TryFrom<CollocatedRecord> for CollocatedAirfoil {
    type Error = Error;

    fn try_from(r: CollocatedRecord) -> Result<Self> {
        CollocatedAirfoil::new(r.name, CollocationGrid::new(r.f)?, r.y)
    }
}

impl CollocatedAirfoil {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CollocatedRecord::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<CollocatedRecord>(text)?.try_into()
    }

    /// CSV with header `i,x,y`; values use Rust's shortest round-trip format.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,x,y\n");
        for (i, &y) in self.y().iter().enumerate() {
            let _ = writeln!(out, "{i},{},{y}", self.grid().x(i));
        }
        out
    }

    pub fn from_csv(name: &str, text: &str) -> Result<Self> {
        let mut y = Vec::new();
        for (k, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let parsed = (cols.len() == 3).then(|| cols[2].trim().parse::<f64>().ok()).flatten();
            let Some(v) = parsed else {
                return Err(Error::Parse { line: k + 1, message: format!("bad row '{line}'") });
            };
            y.push(v);
        }
        if y.len() < 3 || y.len() % 2 == 0 {
            return Err(Error::DegenerateInput(format!("{} rows do not form a grid", y.len())));
        }
        CollocatedAirfoil::new(name, CollocationGrid::new(y.len() - 1)?, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_line_selig() {
        let a = load_airfoil("1 0\n0 0.01\n1 0\n", AirfoilFormat::Selig).unwrap();
        assert_eq!(a.points, vec![(1.0, 0.0), (0.0, 0.01), (1.0, 0.0)]);
        assert_eq!(a.name, "");
    }

    #[test]
    fn name_line_and_leading_dot_numbers() {
        let a = load_airfoil("CLARK YS\n1.0 0.0\n0.0 0.0\n0.0125 -.0157\n", AirfoilFormat::Selig).unwrap();
        assert_eq!(a.name, "CLARK YS");
        assert_eq!(a.points[2], (0.0125, -0.0157));
    }

    #[test]
    fn bad_field_names_the_line() {
        let err = load_airfoil("name\n1 0\n0 abc\n1 0\n", AirfoilFormat::Selig).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("abc"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(load_airfoil("x\n1 0\n0 0\n", AirfoilFormat::Selig), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn lednicer_is_restitched() {
        let text = "NACA TEST\n3. 3.\n\n0 0\n0.5 0.05\n1 0\n\n0 0\n0.5 -0.04\n1 0\n";
        assert_eq!(AirfoilFormat::detect(text), AirfoilFormat::Lednicer);
        let a = load_airfoil(text, AirfoilFormat::Lednicer).unwrap();
        assert_eq!(a.points, vec![(1.0, 0.0), (0.5, 0.05), (0.0, 0.0), (0.5, -0.04), (1.0, 0.0)]);
    }

    #[test]
    fn selig_detected() {
        assert_eq!(AirfoilFormat::detect("n\n1 0\n0 0\n1 0"), AirfoilFormat::Selig);
    }

    #[test]
    fn lednicer_count_mismatch() {
        let text = "x\n3 3\n0 0\n1 0\n0 0\n1 0\n";
        assert!(matches!(load_airfoil(text, AirfoilFormat::Lednicer), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let g = CollocationGrid::new(4).unwrap();
        let a = CollocatedAirfoil::new("s", g, vec![0.0, 0.05, 0.0, -0.04, 1e-3]).unwrap();
        let csv = a.to_csv();
        assert!(csv.starts_with("i,x,y\n0,1,0\n1,0.5,0.05\n"));
        assert_eq!(CollocatedAirfoil::from_csv("s", &csv).unwrap(), a);
        let json = a.to_json().unwrap();
        assert!(json.contains("\"F\":4"));
        assert_eq!(CollocatedAirfoil::from_json(&json).unwrap(), a);
    }
}
