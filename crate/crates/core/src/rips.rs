//! Vietoris–Rips filtrations of a finite point cloud.
//!
//! A simplex enters the filtration at the largest pairwise distance among its
//! vertices. Simplices are kept in a total order: filtration value, then
//! dimension, then lexicographic vertex order, which places every face before
//! its cofacets.

use std::cmp::Ordering;
use std::io::{self, Write};

use thiserror::Error;

use crate::cloud::PointCloud;
use crate::fmt::sig17;

/// Largest simplex dimension the filtration builder will enumerate.
pub const MAX_SIMPLEX_DIM: usize = 3;

/// Default simplex dimension; triangles are needed for H1 deaths.
pub const DEFAULT_MAXDIM: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum RipsError {
    #[error("maximum simplex dimension must be in 1..={MAX_SIMPLEX_DIM}, got {0}")]
    MaxDim(usize),
    #[error("filtration threshold must be a non-negative number, got {0}")]
    Threshold(f64),
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Euclidean distances between the points of `cloud`.
    pub fn euclidean(cloud: &PointCloud) -> Self {
        Self::from_fn(cloud.len(), |i, j| {
            cloud
                .point(i)
                .iter()
                .zip(cloud.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
    }

    /// Builds a matrix from a metric evaluated on `i < j` only, mirrored for symmetry.
    ///
    /// Panics if the metric returns a negative or non-finite value.
    pub fn from_fn(size: usize, mut metric: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; size * size];
        for i in 0..size {
            for j in i + 1..size {
                let d = metric(i, j);
                assert!(d.is_finite() && d >= 0.0, "distance ({i},{j}) = {d}");
                entries[i * size + j] = d;
                entries[j * size + i] = d;
            }
        }
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// Largest pairwise distance; 0 for fewer than two points.
    pub fn enclosing_radius(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// Sorted vertex set of at most `MAX_SIMPLEX_DIM + 1` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    len: u8,
    vertices: [u32; MAX_SIMPLEX_DIM + 1],
}

impl Simplex {
    /// Panics if `vertices` is empty, too long, or not strictly increasing.
    pub fn new(vertices: &[u32]) -> Self {
        assert!(
            !vertices.is_empty() && vertices.len() <= MAX_SIMPLEX_DIM + 1,
            "simplex needs 1..={} vertices",
            MAX_SIMPLEX_DIM + 1
        );
        assert!(
            vertices.windows(2).all(|w| w[0] < w[1]),
            "vertices must be sorted"
        );
        let mut buf = [0; MAX_SIMPLEX_DIM + 1];
        buf[..vertices.len()].copy_from_slice(vertices);
        Self {
            len: vertices.len() as u8,
            vertices: buf,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices[..self.len as usize]
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    /// Codimension-one faces, each obtained by dropping one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.len as usize;
        (0..if n > 1 { n } else { 0 }).map(move |skip| {
            let mut buf = [0; MAX_SIMPLEX_DIM + 1];
            let mut k = 0;
            for (i, &v) in self.vertices().iter().enumerate() {
                if i != skip {
                    buf[k] = v;
                    k += 1;
                }
            }
            Simplex {
                len: (n - 1) as u8,
                vertices: buf,
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilteredSimplex {
    pub simplex: Simplex,
    pub value: f64,
}

impl FilteredSimplex {
    pub fn dim(&self) -> usize {
        self.simplex.dim()
    }

    pub fn vertices(&self) -> &[u32] {
        self.simplex.vertices()
    }

    fn order(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.dim().cmp(&other.dim()))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// Rips simplices in filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    simplices: Vec<FilteredSimplex>,
    maxdim: usize,
    threshold: f64,
    n_vertices: usize,
}

impl Filtration {
    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn maxdim(&self) -> usize {
        self.maxdim
    }

    /// Cutoff scale; simplices with larger values were not generated.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Writes one simplex per line as `value dim v0 v1 ...`.
    pub fn write_debug<W: Write>(&self, mut out: W) -> io::Result<()> {
        for s in &self.simplices {
            write!(out, "{} {}", sig17(s.value), s.dim())?;
            for v in s.vertices() {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Enumerates all simplices of dimension `<= maxdim` with diameter `<= threshold`.
///
/// `threshold` defaults to the enclosing radius, which admits every simplex.
/// The requested cutoff, or the enclosing radius when none is given.
pub fn resolve_threshold(dm: &DistanceMatrix, threshold: Option<f64>) -> Result<f64, RipsError> {
    match threshold {
        Some(t) if t.is_nan() || t < 0.0 => Err(RipsError::Threshold(t)),
        Some(t) => Ok(t),
        None => Ok(dm.enclosing_radius()),
    }
}

pub fn build_filtration(
    dm: &DistanceMatrix,
    maxdim: usize,
    threshold: Option<f64>,
) -> Result<Filtration, RipsError> {
    if !(1..=MAX_SIMPLEX_DIM).contains(&maxdim) {
        return Err(RipsError::MaxDim(maxdim));
    }
    let threshold = resolve_threshold(dm, threshold)?;

    let n = dm.size();
    let mut simplices = Vec::new();
    let mut stack = Vec::with_capacity(maxdim + 1);
    for v in 0..n {
        stack.push(v as u32);
        expand(dm, maxdim, threshold, &mut stack, 0.0, &mut simplices);
        stack.pop();
    }
    simplices.sort_unstable_by(FilteredSimplex::order);
    Ok(Filtration {
        simplices,
        maxdim,
        threshold,
        n_vertices: n,
    })
}

fn expand(
    dm: &DistanceMatrix,
    maxdim: usize,
    threshold: f64,
    stack: &mut Vec<u32>,
    value: f64,
    out: &mut Vec<FilteredSimplex>,
) {
    out.push(FilteredSimplex {
        simplex: Simplex::new(stack),
        value,
    });
    if stack.len() > maxdim {
        return;
    }
    let last = *stack.last().unwrap() as usize;
    for next in last + 1..dm.size() {
        let diameter = stack
            .iter()
            .map(|&v| dm.get(v as usize, next))
            .fold(value, f64::max);
        if diameter <= threshold {
            stack.push(next as u32);
            expand(dm, maxdim, threshold, stack, diameter, out);
            stack.pop();
        }
    }
}
