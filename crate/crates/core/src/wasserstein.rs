//! Wasserstein and bottleneck distances between persistence diagrams.
//!
//! Both diagrams are augmented with diagonal slots so that every off-diagonal
//! point may be matched either to a point of the other diagram or to its
//! nearest diagonal point. Ground distances use the sup norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::{has_perfect_matching, min_cost_assignment};
use crate::persistence::{DiagramPoint, PersistenceDiagram};

pub const DEFAULT_DEGREE: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum WassersteinError {
    #[error("cannot compare an H{left} diagram with an H{right} diagram")]
    DimensionMismatch { left: usize, right: usize },
    #[error("Wasserstein degree must be a finite number >= 1, got {0}")]
    InvalidDegree(f64),
    #[error("diagram has infinite deaths; cap essential classes first")]
    InfiniteDeath,
    #[error("need at least 2 diagrams, got {0}")]
    TooFewDiagrams(usize),
}

/// How one element of the augmented matching is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Matched {
    /// Point `i` of the left diagram with point `j` of the right.
    Pair(usize, usize),
    /// Left point sent to the diagonal.
    LeftToDiagonal(usize),
    /// Right point sent to the diagonal.
    RightToDiagonal(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WassersteinResult {
    pub p: f64,
    pub distance: f64,
    /// Off-diagonal parts of an optimal matching; diagonal-to-diagonal slots are omitted.
    pub matching: Vec<Matched>,
}

/// Sup-norm distance between two diagram points.
pub fn sup_distance(a: &DiagramPoint, b: &DiagramPoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// Sup-norm distance from a point to the diagonal: half its persistence.
pub fn diagonal_distance(a: &DiagramPoint) -> f64 {
    (a.death - a.birth) / 2.0
}

fn check_pair(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<(), WassersteinError> {
    if a.dim != b.dim {
        return Err(WassersteinError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(WassersteinError::InfiniteDeath);
    }
    Ok(())
}

/// Degree-`p` Wasserstein distance: the minimum over bijections of the
/// diagonally augmented diagrams of `(Σ ‖x − φ(x)‖_∞^p)^(1/p)`.
pub fn wasserstein_distance(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    p: f64,
) -> Result<WassersteinResult, WassersteinError> {
    check_pair(a, b)?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(WassersteinError::InvalidDegree(p));
    }
    let (left, right) = (a.points(), b.points());
    let (na, nb) = (left.len(), right.len());
    let n = na + nb;

    // rows: left points, then one diagonal slot per right point
    // cols: right points, then one diagonal slot per left point
    let mut cost = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            cost[r * n + c] = match (r < na, c < nb) {
                (true, true) => sup_distance(&left[r], &right[c]).powf(p),
                (true, false) => diagonal_distance(&left[r]).powf(p),
                (false, true) => diagonal_distance(&right[c]).powf(p),
                (false, false) => 0.0,
            };
        }
    }
    let assignment = min_cost_assignment(n, &cost);
    let total: f64 = (0..n).map(|r| cost[r * n + assignment[r]]).sum();
    let matching = assignment
        .iter()
        .enumerate()
        .filter_map(|(r, &c)| match (r < na, c < nb) {
            (true, true) => Some(Matched::Pair(r, c)),
            (true, false) => Some(Matched::LeftToDiagonal(r)),
            (false, true) => Some(Matched::RightToDiagonal(c)),
            (false, false) => None,
        })
        .collect();
    Ok(WassersteinResult {
        p,
        distance: total.powf(1.0 / p),
        matching,
    })
}

/// `W(d_t, d_{t+1})` for every consecutive pair, in time order.
pub fn consecutive_distances(
    diagrams: &[PersistenceDiagram],
    p: f64,
) -> Result<Vec<f64>, WassersteinError> {
    if diagrams.len() < 2 {
        return Err(WassersteinError::TooFewDiagrams(diagrams.len()));
    }
    diagrams
        .par_windows(2)
        .map(|w| wasserstein_distance(&w[0], &w[1], p).map(|r| r.distance))
        .collect()
}

/// Bottleneck distance, the `p → ∞` limit of the Wasserstein distance.
///
/// Essential classes are matched among themselves by birth; unequal essential
/// counts give an infinite distance.
pub fn bottleneck_distance(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
) -> Result<f64, WassersteinError> {
    if a.dim != b.dim {
        return Err(WassersteinError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let split = |d: &PersistenceDiagram| {
        let (finite, essential): (Vec<DiagramPoint>, Vec<DiagramPoint>) =
            d.points().iter().partition(|p| p.death.is_finite());
        let mut births: Vec<f64> = essential.iter().map(|p| p.birth).collect();
        births.sort_by(f64::total_cmp);
        (finite, births)
    };
    let (left, left_ess) = split(a);
    let (right, right_ess) = split(b);
    if left_ess.len() != right_ess.len() {
        return Ok(f64::INFINITY);
    }
    let essential_cost = left_ess
        .iter()
        .zip(&right_ess)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let (na, nb) = (left.len(), right.len());
    let n = na + nb;
    let edge = |r: usize, c: usize| -> f64 {
        match (r < na, c < nb) {
            (true, true) => sup_distance(&left[r], &right[c]),
            (true, false) => diagonal_distance(&left[r]),
            (false, true) => diagonal_distance(&right[c]),
            (false, false) => 0.0,
        }
    };
    let mut candidates: Vec<f64> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| edge(r, c))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // smallest candidate admitting a perfect matching
    let (mut lo, mut hi) = (0, candidates.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let eps = candidates[mid];
        if has_perfect_matching(n, |r, c| edge(r, c) <= eps) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let finite_cost = candidates.get(lo).copied().unwrap_or(0.0);
    Ok(finite_cost.max(essential_cost))
}
