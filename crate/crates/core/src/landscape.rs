//! Persistence landscapes and their L^p norms.
//!
//! Each diagram point `(b, d)` contributes a tent that rises with slope 1 from
//! `(b, 0)` to `((b + d) / 2, (d - b) / 2)` and falls back to `(d, 0)`. Level `k`
//! of the landscape is the pointwise k-th largest tent value.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::fmt::sig17;
use crate::persistence::PersistenceDiagram;

/// A continuous, piecewise-linear, compactly supported function given by its breakpoints.
///
/// The function is zero outside `[first x, last x]` and linear between consecutive breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeLevel {
    points: Vec<(f64, f64)>,
}

impl LandscapeLevel {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.points;
        if pts.is_empty() || x <= pts[0].0 || x >= pts[pts.len() - 1].0 {
            return 0.0;
        }
        let i = pts.partition_point(|&(px, _)| px <= x);
        let (x0, y0) = pts[i - 1];
        let (x1, y1) = pts[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `∫ λ`, exact for piecewise-linear functions.
    pub fn integral(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }

    /// `∫ λ²`, exact for piecewise-linear functions.
    pub fn squared_integral(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let (y0, y1) = (w[0].1, w[1].1);
                (w[1].0 - w[0].0) * (y0 * y0 + y0 * y1 + y1 * y1) / 3.0
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceLandscape {
    /// Homology dimension of the source diagram.
    pub dim: usize,
    levels: Vec<LandscapeLevel>,
}

impl PersistenceLandscape {
    /// Levels λ_1, λ_2, ... (index 0 holds λ_1).
    pub fn levels(&self) -> &[LandscapeLevel] {
        &self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// λ_k(x) with 1-based `k`; zero for levels that do not exist.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        assert!(k >= 1, "landscape levels are numbered from 1");
        self.levels.get(k - 1).map_or(0.0, |l| l.eval(x))
    }

    /// Writes `level,x,y` rows (1-based level) for every breakpoint.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "level,x,y")?;
        for (k, level) in self.levels.iter().enumerate() {
            for &(x, y) in level.points() {
                writeln!(out, "{},{},{}", k + 1, sig17(x), sig17(y))?;
            }
        }
        Ok(())
    }
}

fn tent(b: f64, d: f64, x: f64) -> f64 {
    (x - b).min(d - x).max(0.0)
}

/// Builds the exact landscape of a diagram with finite deaths.
///
/// Panics if a death is infinite; cap essential classes first.
pub fn build_landscape(diagram: &PersistenceDiagram) -> PersistenceLandscape {
    let bars: Vec<(f64, f64)> = diagram
        .points()
        .iter()
        .filter(|p| p.death > p.birth)
        .map(|p| {
            assert!(
                p.death.is_finite(),
                "landscape needs finite deaths; cap essential classes first"
            );
            (p.birth, p.death)
        })
        .collect();
    if bars.is_empty() {
        return PersistenceLandscape {
            dim: diagram.dim,
            levels: Vec::new(),
        };
    }

    // Between consecutive xs every tent is linear and their order is fixed:
    // tents change slope at b, (b+d)/2, d and a rising edge meets a falling one at (b_i+d_j)/2.
    let mut xs: Vec<f64> = Vec::with_capacity(bars.len() * (bars.len() + 2));
    for &(b, d) in &bars {
        xs.push(b);
        xs.push(d);
        for &(_, d2) in &bars {
            let x = (b + d2) / 2.0;
            if x > b && x < d2 {
                xs.push(x);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(xs.len());
    let mut depth = 0;
    for &x in &xs {
        let mut values: Vec<f64> = bars
            .iter()
            .map(|&(b, d)| tent(b, d, x))
            .filter(|&v| v > 0.0)
            .collect();
        values.sort_by(|a, b| b.total_cmp(a));
        depth = depth.max(values.len());
        columns.push(values);
    }

    let levels = (0..depth)
        .map(|k| {
            let raw = xs
                .iter()
                .zip(&columns)
                .map(|(&x, vals)| (x, vals.get(k).copied().unwrap_or(0.0)));
            LandscapeLevel {
                points: simplify(raw),
            }
        })
        .collect();
    PersistenceLandscape {
        dim: diagram.dim,
        levels,
    }
}

/// Keeps only breakpoints where the slope changes, trimming zero runs at both ends.
fn simplify(raw: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let raw: Vec<(f64, f64)> = raw.collect();
    let first = raw.iter().position(|p| p.1 > 0.0).unwrap_or(0);
    let last = raw.iter().rposition(|p| p.1 > 0.0).unwrap_or(0);
    let lo = first.saturating_sub(1);
    let hi = (last + 1).min(raw.len() - 1);
    let slope = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (b.0 - a.0);
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(hi - lo + 1);
    for &p in &raw[lo..=hi] {
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            if (slope(a, b) - slope(b, p)).abs() <= 1e-9 {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// Which L^p norm to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LpNorm {
    L1,
    L2,
}

impl LpNorm {
    pub fn p(self) -> u32 {
        match self {
            LpNorm::L1 => 1,
            LpNorm::L2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub norm: LpNorm,
    pub value: f64,
}

/// `(Σ_k ‖λ_k‖_p^p)^(1/p)` by exact integration of every segment.
pub fn lp_norm(landscape: &PersistenceLandscape, norm: LpNorm) -> NormValue {
    let value = match norm {
        LpNorm::L1 => landscape.levels.iter().map(LandscapeLevel::integral).sum(),
        LpNorm::L2 => landscape
            .levels
            .iter()
            .map(LandscapeLevel::squared_integral)
            .sum::<f64>()
            .sqrt(),
    };
    NormValue { norm, value }
}
