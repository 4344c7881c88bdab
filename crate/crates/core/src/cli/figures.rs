use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::model::{Branch, GasParameters, Profile, Scenario, WaveMode};
use crate::solutions::{evaluate_forced, QuadratureSpec};

use super::output::CsvWriter;

/// One of the reproduced figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureId {
    F1a,
    F1b,
    F1c,
    F2a,
    F2b,
    F2c,
    F3a,
    F3b,
    F4a,
    F4b,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::F1a,
        FigureId::F1b,
        FigureId::F1c,
        FigureId::F2a,
        FigureId::F2b,
        FigureId::F2c,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F4a,
        FigureId::F4b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::F1a => "1a",
            FigureId::F1b => "1b",
            FigureId::F1c => "1c",
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F2c => "2c",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F4a => "4a",
            FigureId::F4b => "4b",
        }
    }

    /// Time series at one point (figures 1 and 2) rather than a space-time
    /// table along the x-axis.
    pub fn is_point_series(self) -> bool {
        matches!(self, FigureId::F1a | FigureId::F1b | FigureId::F1c | FigureId::F2a | FigureId::F2b | FigureId::F2c)
    }

    /// Pressure rather than `v_x`.
    pub fn is_pressure(self) -> bool {
        matches!(self, FigureId::F2a | FigureId::F2b | FigureId::F2c | FigureId::F3b | FigureId::F4b)
    }

    /// Value of `x + y + z` on the sampled plane.
    pub fn plane(self) -> Option<f64> {
        match self {
            FigureId::F1a | FigureId::F2a => Some(0.0),
            FigureId::F1b | FigureId::F2b => Some(6.0),
            FigureId::F1c | FigureId::F2c => Some(100.0),
            _ => None,
        }
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure id {s:?} (expected one of 1a,1b,1c,2a,2b,2c,3a,3b,4a,4b)"))
    }
}

/// Sampling of one figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigureSpec {
    pub id: FigureId,
    pub t_max: f64,
    pub dt: f64,
    /// x-range and spacing for the axis figures.
    pub x_range: (f64, f64),
    pub dx: f64,
}

impl FigureSpec {
    pub fn new(id: FigureId) -> Self {
        if id.is_point_series() {
            FigureSpec { id, t_max: 3600.0, dt: 0.01, x_range: (0.0, 0.0), dx: 1.0 }
        } else {
            FigureSpec { id, t_max: 600.0, dt: 1.0, x_range: (-20.0, 20.0), dx: 0.5 }
        }
    }
}

/// `f1 = sin`, all modes `(1,1,1)`, forced at `ω_f = U0 − c0√3`.
pub fn resonant_scenario() -> Scenario {
    let gas = GasParameters::reference_air();
    let mode = WaveMode::new(1.0, 1.0, 1.0);
    let omega = mode.characteristic_speed(Branch::AcousticSlow, &gas);
    Scenario::new(gas, [mode; 4], [Profile::Sin, Profile::Zero, Profile::Zero, Profile::Zero])
        .and_then(|s| s.with_forcing(omega))
        .expect("reference scenario is valid")
}

/// [`resonant_scenario`] with `f1` cut to `[−1, 1]`.
pub fn compact_scenario() -> Scenario {
    let s = resonant_scenario();
    s.with_profiles([Profile::TruncatedSin { a: -1.0, b: 1.0 }, Profile::Zero, Profile::Zero, Profile::Zero])
        .expect("reference scenario is valid")
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Figure data as `(header, rows)`.
pub fn figure_table(spec: &FigureSpec) -> Result<(Vec<&'static str>, Vec<Vec<f64>>)> {
    let id = spec.id;
    let s = match id {
        FigureId::F4a | FigureId::F4b => compact_scenario(),
        _ => resonant_scenario(),
    };
    let q = QuadratureSpec::default();
    let component = if id.is_pressure() { 3 } else { 0 };
    let times = steps(0.0, spec.t_max, spec.dt);
    if let Some(plane) = id.plane() {
        let rows = times
            .par_iter()
            .map(|&t| Ok(vec![t, evaluate_forced(&s, plane, 0.0, 0.0, t, &q)?.components()[component]]))
            .collect::<Result<Vec<_>>>()?;
        let header = if id.is_pressure() { vec!["t", "p"] } else { vec!["t", "vx"] };
        return Ok((header, rows));
    }
    let xs = steps(spec.x_range.0, spec.x_range.1, spec.dx);
    let rows = times
        .par_iter()
        .map(|&t| {
            xs.iter()
                .map(|&x| Ok(vec![t, x, evaluate_forced(&s, x, 0.0, 0.0, t, &q)?.components()[component]]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok((vec!["t", "x", "value"], rows))
}

pub fn figure_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut w = CsvWriter::new(header);
    for r in rows {
        w.row(r);
    }
    w.finish()
}

/// Series drawn in the SVG: the point series itself, or a few x-stations.
pub fn figure_series(spec: &FigureSpec, rows: &[Vec<f64>]) -> Vec<(String, Vec<(f64, f64)>)> {
    if spec.id.is_point_series() {
        return vec![(spec.id.name().to_string(), rows.iter().map(|r| (r[0], r[1])).collect())];
    }
    let (lo, hi) = spec.x_range;
    let mut out = Vec::new();
    for st in [lo, 0.5 * (lo + hi), hi] {
        let nearest = rows.iter().map(|r| r[1]).min_by(|a, b| (a - st).abs().total_cmp(&(b - st).abs()));
        if let Some(xn) = nearest {
            let pts = rows.iter().filter(|r| r[1] == xn).map(|r| (r[0], r[2])).collect();
            out.push((format!("x = {xn}"), pts));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!("5a".parse::<FigureId>().is_err());
    }

    #[test]
    fn short_point_series() {
        let spec = FigureSpec { t_max: 1.0, ..FigureSpec::new(FigureId::F1a) };
        let (header, rows) = figure_table(&spec).unwrap();
        assert_eq!(header, vec!["t", "vx"]);
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[0][1], 0.0);
    }

    #[test]
    fn axis_table_shape() {
        let spec = FigureSpec { t_max: 2.0, ..FigureSpec::new(FigureId::F4b) };
        let (_, rows) = figure_table(&spec).unwrap();
        assert_eq!(rows.len(), 3 * 81);
        assert_eq!(figure_series(&spec, &rows).len(), 3);
    }
}
