//! Point clouds in R^n built from aligned returns, and sliding windows over them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::ReturnMatrix;

/// Window length used when nothing else is configured: 60 trading days.
pub const DEFAULT_WINDOW: usize = 60;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CloudError {
    #[error("window of {window} points exceeds cloud of {points}")]
    WindowTooLarge { window: usize, points: usize },
    #[error("window size must be at least 2, got {0}")]
    WindowTooSmall(usize),
    #[error("window step must be positive")]
    ZeroStep,
}

/// Time-ordered points of a common dimension, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Panics if `coords.len()` is not a multiple of `dim`, `dim == 0`, or a coordinate is non-finite.
    pub fn new(dim: usize, coords: Vec<f64>) -> Self {
        assert!(dim >= 1, "point dimension must be at least 1");
        assert_eq!(
            coords.len() % dim,
            0,
            "coordinate count must be a multiple of dim"
        );
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "coordinates must be finite"
        );
        Self { dim, coords }
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Self {
        let dim = points.first().map_or(1, |p| p.as_ref().len());
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            assert_eq!(p.as_ref().len(), dim, "points must share one dimension");
            coords.extend_from_slice(p.as_ref());
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Contiguous sub-cloud of `len` points starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> PointCloud {
        PointCloud {
            dim: self.dim,
            coords: self.coords[start * self.dim..(start + len) * self.dim].to_vec(),
        }
    }

    /// Every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> PointCloud {
        PointCloud::new(self.dim, self.coords.iter().map(|c| c * factor).collect())
    }

    /// Per-axis z-scores over the whole cloud. Axes with zero spread are only centred.
    pub fn standardized(&self) -> PointCloud {
        let m = self.len() as f64;
        let mut coords = self.coords.clone();
        for axis in 0..self.dim {
            let column = || self.points().map(|p| p[axis]);
            let mean = column().sum::<f64>() / m;
            let var = column().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
            let sd = var.sqrt();
            for c in coords.iter_mut().skip(axis).step_by(self.dim) {
                *c = if sd > 0.0 {
                    (*c - mean) / sd
                } else {
                    *c - mean
                };
            }
        }
        PointCloud::new(self.dim, coords)
    }
}

/// Point `j` is the vector of every series' return on day `j`.
pub fn build_cloud(returns: &ReturnMatrix) -> PointCloud {
    let n = returns.n_series();
    let m = returns.len();
    let mut coords = Vec::with_capacity(n * m);
    for j in 0..m {
        coords.extend(returns.rows().iter().map(|row| row[j]));
    }
    PointCloud::new(n.max(1), coords)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub size: usize,
    pub step: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            size: DEFAULT_WINDOW,
            step: 1,
        }
    }
}

impl WindowSpec {
    pub fn new(size: usize, step: usize) -> Self {
        Self { size, step }
    }

    /// Number of windows over `points` points: `floor((m - w) / step) + 1`.
    pub fn count(&self, points: usize) -> Result<usize, CloudError> {
        self.validate(points)?;
        Ok((points - self.size) / self.step + 1)
    }

    /// Start indices of every window over `points` points.
    pub fn starts(&self, points: usize) -> Result<impl Iterator<Item = usize>, CloudError> {
        let count = self.count(points)?;
        let step = self.step;
        Ok((0..count).map(move |k| k * step))
    }

    fn validate(&self, points: usize) -> Result<(), CloudError> {
        if self.size < 2 {
            return Err(CloudError::WindowTooSmall(self.size));
        }
        if self.step == 0 {
            return Err(CloudError::ZeroStep);
        }
        if self.size > points {
            return Err(CloudError::WindowTooLarge {
                window: self.size,
                points,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    /// Index of the first point in the parent cloud.
    pub start: usize,
    pub cloud: PointCloud,
}

impl Window {
    /// Index of the last point in the parent cloud.
    pub fn end(&self) -> usize {
        self.start + self.cloud.len() - 1
    }
}

/// All windows of `spec.size` consecutive points, advancing by `spec.step`.
pub fn windows(cloud: &PointCloud, spec: WindowSpec) -> Result<Vec<Window>, CloudError> {
    Ok(spec
        .starts(cloud.len())?
        .map(|start| Window {
            start,
            cloud: cloud.slice(start, spec.size),
        })
        .collect())
}
