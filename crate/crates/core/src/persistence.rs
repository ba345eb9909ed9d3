//! Boundary-matrix reduction over GF(2) and persistence diagrams for H0 and H1.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::fmt::sig17;
use crate::rips::{
    build_filtration, resolve_threshold, DistanceMatrix, Filtration, RipsError, Simplex,
    MAX_SIMPLEX_DIM,
};

/// Column reduction strategy. All variants produce the same pairing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Left-to-right column additions.
    Standard,
    /// Reduce from the top dimension down, zeroing columns of known birth simplices.
    Twist,
    /// Reduce the coboundary matrix from the lowest dimension up, in reverse
    /// filtration order, skipping columns of known death simplices.
    #[default]
    Cohomology,
}

/// Persistence pairing expressed as filtration indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    /// `(birth, death)` simplex indices, sorted by death index.
    pub pairs: Vec<(usize, usize)>,
    /// Unpaired simplices that create a class never destroyed in the filtration.
    pub essentials: Vec<usize>,
}

/// Sparse GF(2) boundary matrix: column `j` lists the filtration indices of the facets of simplex `j`.
struct BoundaryMatrix {
    columns: Vec<Vec<usize>>,
    dims: Vec<usize>,
}

impl BoundaryMatrix {
    fn new(filtration: &Filtration) -> Self {
        let n = filtration.n_vertices();
        let simplices = filtration.simplices();
        let mut vertex_index = vec![usize::MAX; n];
        let mut edge_index = vec![usize::MAX; n * n];
        let mut higher: HashMap<Simplex, usize> = HashMap::new();
        for (i, s) in simplices.iter().enumerate() {
            match s.vertices() {
                [v] => vertex_index[*v as usize] = i,
                [a, b] => edge_index[*a as usize * n + *b as usize] = i,
                _ if s.dim() < filtration.maxdim() => {
                    higher.insert(s.simplex, i);
                }
                _ => {}
            }
        }
        let columns = simplices
            .iter()
            .map(|s| {
                let mut col: Vec<usize> = match s.dim() {
                    0 => Vec::new(),
                    1 => s
                        .vertices()
                        .iter()
                        .map(|&v| vertex_index[v as usize])
                        .collect(),
                    _ => s
                        .simplex
                        .facets()
                        .map(|f| match f.vertices() {
                            [a, b] => edge_index[*a as usize * n + *b as usize],
                            _ => higher[&f],
                        })
                        .collect(),
                };
                col.sort_unstable();
                col
            })
            .collect();
        Self {
            columns,
            dims: simplices.iter().map(|s| s.dim()).collect(),
        }
    }
}

/// `target ^= other` for sorted index sets.
fn add_column<T: Ord + Copy>(target: &mut Vec<T>, other: &[T], scratch: &mut Vec<T>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

struct Reducer {
    columns: Vec<Vec<usize>>,
    /// `owner[row] = column` whose reduced pivot is `row`.
    owner: Vec<usize>,
    scratch: Vec<usize>,
}

impl Reducer {
    fn reduce_column(&mut self, j: usize) {
        let mut col = std::mem::take(&mut self.columns[j]);
        while let Some(&low) = col.last() {
            let k = self.owner[low];
            if k == usize::MAX {
                self.owner[low] = j;
                break;
            }
            add_column(&mut col, &self.columns[k], &mut self.scratch);
        }
        self.columns[j] = col;
    }
}

/// Pairing from the anti-transposed boundary matrix.
///
/// Column `j` holds the cofacets of simplex `j`; its pivot is the earliest cofacet.
fn reduce_cohomology(filtration: &Filtration, boundary: BoundaryMatrix) -> ReductionResult {
    let BoundaryMatrix { columns, dims } = boundary;
    let n = columns.len();
    let mut coboundary = vec![Vec::new(); n];
    for (j, col) in columns.iter().enumerate() {
        for &i in col {
            coboundary[i].push(j);
        }
    }
    let mut owner = vec![usize::MAX; n];
    let mut birth_of = vec![usize::MAX; n];
    let mut scratch = Vec::new();
    for dim in 0..filtration.maxdim() {
        for j in (0..n).rev().filter(|&j| dims[j] == dim) {
            if birth_of[j] != usize::MAX {
                coboundary[j].clear();
                continue;
            }
            let mut col = std::mem::take(&mut coboundary[j]);
            while let Some(&pivot) = col.first() {
                let k = owner[pivot];
                if k == usize::MAX {
                    owner[pivot] = j;
                    birth_of[pivot] = j;
                    break;
                }
                add_column(&mut col, &coboundary[k], &mut scratch);
            }
            coboundary[j] = col;
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..n)
        .filter(|&d| birth_of[d] != usize::MAX)
        .map(|d| (birth_of[d], d))
        .collect();
    pairs.sort_unstable_by_key(|&(_, d)| d);
    let essentials = (0..n)
        .filter(|&j| birth_of[j] == usize::MAX && coboundary[j].is_empty())
        .collect();
    ReductionResult { pairs, essentials }
}

/// Computes the persistence pairing of `filtration`.
pub fn reduce(filtration: &Filtration, algorithm: Reduction) -> ReductionResult {
    let boundary = BoundaryMatrix::new(filtration);
    if algorithm == Reduction::Cohomology {
        return reduce_cohomology(filtration, boundary);
    }
    let BoundaryMatrix { columns, dims } = boundary;
    let n = columns.len();
    let mut reducer = Reducer {
        columns,
        owner: vec![usize::MAX; n],
        scratch: Vec::new(),
    };
    match algorithm {
        Reduction::Standard => {
            for j in 0..n {
                reducer.reduce_column(j);
            }
        }
        Reduction::Cohomology => unreachable!("handled above"),
        Reduction::Twist => {
            let mut cleared = vec![false; n];
            for dim in (1..=filtration.maxdim()).rev() {
                for j in (0..n).filter(|&j| dims[j] == dim) {
                    if cleared[j] {
                        reducer.columns[j].clear();
                        continue;
                    }
                    reducer.reduce_column(j);
                    if let Some(&low) = reducer.columns[j].last() {
                        cleared[low] = true;
                    }
                }
            }
        }
    }

    let mut pairs = Vec::new();
    let mut essentials = Vec::new();
    for j in 0..n {
        match reducer.columns[j].last() {
            Some(&low) => pairs.push((low, j)),
            None if reducer.owner[j] == usize::MAX => essentials.push(j),
            None => {}
        }
    }
    ReductionResult { pairs, essentials }
}

/// One `(birth, death)` point. Essential classes carry `death = +inf` until capped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
    /// The class never dies; `death` is infinite or a substituted cap.
    pub essential: bool,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Self {
        Self {
            birth,
            death,
            essential: false,
        }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Multiset of persistence points for one homology dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub dim: usize,
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    /// Sorts the points; zero-length finite pairs are dropped.
    pub fn new(dim: usize, points: impl IntoIterator<Item = DiagramPoint>) -> Self {
        let mut points: Vec<DiagramPoint> = points
            .into_iter()
            .filter(|p| p.essential || p.death > p.birth)
            .collect();
        points.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
                .then(a.essential.cmp(&b.essential))
        });
        Self { dim, points }
    }

    /// Finite diagram from plain `(birth, death)` pairs.
    pub fn from_pairs(dim: usize, pairs: &[(f64, f64)]) -> Self {
        Self::new(dim, pairs.iter().map(|&(b, d)| DiagramPoint::new(b, d)))
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
        }
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn essential_count(&self) -> usize {
        self.points.iter().filter(|p| p.essential).count()
    }

    /// True when every death is a finite number.
    pub fn is_finite(&self) -> bool {
        self.points.iter().all(|p| p.death.is_finite())
    }

    /// Replaces infinite deaths with `cap`, keeping the essential tag.
    ///
    /// Essential points born at or after `cap` would have no length and are dropped.
    pub fn capped(&self, cap: f64) -> PersistenceDiagram {
        PersistenceDiagram::new(
            self.dim,
            self.points.iter().filter_map(|p| {
                if !p.death.is_finite() {
                    (cap > p.birth).then_some(DiagramPoint { death: cap, ..*p })
                } else {
                    Some(*p)
                }
            }),
        )
    }

    /// Every coordinate multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> PersistenceDiagram {
        PersistenceDiagram::new(
            self.dim,
            self.points.iter().map(|p| DiagramPoint {
                birth: p.birth * factor,
                death: p.death * factor,
                essential: p.essential,
            }),
        )
    }

    /// Appends CSV rows `window_start,dim,birth,death,essential`.
    pub fn write_csv_rows<W: Write>(&self, mut out: W, window_start: usize) -> io::Result<()> {
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                window_start,
                self.dim,
                sig17(p.birth),
                sig17(p.death),
                u8::from(p.essential)
            )?;
        }
        Ok(())
    }
}

/// Highest homology dimension reported in diagrams.
pub const MAX_HOMOLOGY_DIM: usize = 1;

/// H0 and H1 diagrams read off a reduction of `filtration`.
pub fn diagrams(result: &ReductionResult, filtration: &Filtration) -> Vec<PersistenceDiagram> {
    let simplices = filtration.simplices();
    (0..=MAX_HOMOLOGY_DIM)
        .map(|k| {
            let finite = result
                .pairs
                .iter()
                .filter(|&&(b, _)| simplices[b].dim() == k)
                .map(|&(b, d)| DiagramPoint::new(simplices[b].value, simplices[d].value));
            let essential = result
                .essentials
                .iter()
                .filter(|&&e| simplices[e].dim() == k)
                .map(|&e| DiagramPoint {
                    birth: simplices[e].value,
                    death: f64::INFINITY,
                    essential: true,
                });
            PersistenceDiagram::new(k, finite.chain(essential))
        })
        .collect()
}

/// Settings for computing diagrams of one point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomologyOptions {
    pub maxdim: usize,
    /// Filtration cutoff; the enclosing radius when absent.
    pub threshold: Option<f64>,
    pub reduction: Reduction,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        Self {
            maxdim: crate::rips::DEFAULT_MAXDIM,
            threshold: None,
            reduction: Reduction::Cohomology,
        }
    }
}

/// Diagrams of a cloud together with the filtration cutoff used for essential classes.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudDiagrams {
    pub diagrams: Vec<PersistenceDiagram>,
    pub threshold: f64,
}

impl CloudDiagrams {
    pub fn get(&self, dim: usize) -> &PersistenceDiagram {
        &self.diagrams[dim]
    }

    /// Diagram of `dim` with essential deaths replaced by the filtration cutoff.
    pub fn finite(&self, dim: usize) -> PersistenceDiagram {
        self.diagrams[dim].capped(self.threshold)
    }
}

/// Triangle `a < b < c`; field order makes the derived order the filtration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cofacet {
    /// Bit pattern of the non-negative filtration value, which sorts like the value.
    value_bits: u64,
    /// `(a * n + b) * n + c`, which orders triangles of equal value lexicographically.
    code: u64,
}

impl Cofacet {
    fn value(self) -> f64 {
        f64::from_bits(self.value_bits)
    }
}

/// Coboundary column kept unsorted until it takes part in an addition.
struct LazyColumn {
    entries: Vec<Cofacet>,
    sorted: bool,
}

impl LazyColumn {
    fn sorted(&mut self) -> &[Cofacet] {
        if !self.sorted {
            self.entries.sort_unstable();
            self.sorted = true;
        }
        &self.entries
    }
}

/// H0 and H1 diagrams without materializing the filtration.
///
/// H0 comes from merging components along edges in filtration order. H1 reduces
/// the coboundary columns of the remaining edges, generating each column's
/// triangles on the fly from the distance matrix.
fn implicit_diagrams(
    dm: &DistanceMatrix,
    maxdim: usize,
    threshold: f64,
) -> Vec<PersistenceDiagram> {
    let n = dm.size();
    let mut edges: Vec<(f64, u32, u32)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let d = dm.get(a, b);
            if d <= threshold {
                edges.push((d, a as u32, b as u32));
            }
        }
    }
    edges.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut h0 = Vec::with_capacity(n);
    let mut cycle_edges = Vec::new();
    for &(d, a, b) in &edges {
        let (ra, rb) = (root(&mut parent, a as usize), root(&mut parent, b as usize));
        if ra == rb {
            cycle_edges.push((d, a, b));
        } else {
            parent[ra.max(rb)] = ra.min(rb);
            h0.push(DiagramPoint::new(0.0, d));
        }
    }
    for v in 0..n {
        if root(&mut parent, v) == v {
            h0.push(DiagramPoint {
                birth: 0.0,
                death: f64::INFINITY,
                essential: true,
            });
        }
    }

    let essential = |birth: f64| DiagramPoint {
        birth,
        death: f64::INFINITY,
        essential: true,
    };
    let mut h1 = Vec::new();
    if maxdim < 2 {
        h1.extend(cycle_edges.iter().map(|e| essential(e.0)));
    } else {
        let n64 = n as u64;
        let mut reduced: Vec<LazyColumn> = Vec::with_capacity(cycle_edges.len());
        let mut owner: HashMap<u64, usize> = HashMap::with_capacity(cycle_edges.len());
        let mut scratch = Vec::new();
        for &(d, a, b) in cycle_edges.iter().rev() {
            let (a, b) = (a as usize, b as usize);
            let mut col: Vec<Cofacet> = (0..n)
                .filter(|&c| c != a && c != b)
                .filter_map(|c| {
                    let (da, db) = (dm.get(a, c), dm.get(b, c));
                    if da > threshold || db > threshold {
                        return None;
                    }
                    let v = match c {
                        c if c < a => [c, a, b],
                        c if c < b => [a, c, b],
                        c => [a, b, c],
                    }
                    .map(|x| x as u64);
                    Some(Cofacet {
                        value_bits: d.max(da).max(db).to_bits(),
                        code: (v[0] * n64 + v[1]) * n64 + v[2],
                    })
                })
                .collect();
            let mut sorted = false;
            let mut pivot = col.iter().min().copied();
            while let Some(p) = pivot {
                let Some(&k) = owner.get(&p.code) else {
                    owner.insert(p.code, reduced.len());
                    break;
                };
                if !sorted {
                    col.sort_unstable();
                    sorted = true;
                }
                add_column(&mut col, reduced[k].sorted(), &mut scratch);
                pivot = col.first().copied();
            }
            match pivot {
                Some(p) => h1.push(DiagramPoint::new(d, p.value())),
                None => h1.push(essential(d)),
            }
            reduced.push(LazyColumn {
                entries: col,
                sorted,
            });
        }
    }
    vec![
        PersistenceDiagram::new(0, h0),
        PersistenceDiagram::new(1, h1),
    ]
}

/// Rips persistence of `cloud` in dimensions 0 and 1.
pub fn cloud_diagrams(
    cloud: &PointCloud,
    options: &HomologyOptions,
) -> Result<CloudDiagrams, RipsError> {
    let dm = DistanceMatrix::euclidean(cloud);
    if options.reduction == Reduction::Cohomology {
        if !(1..=MAX_SIMPLEX_DIM).contains(&options.maxdim) {
            return Err(RipsError::MaxDim(options.maxdim));
        }
        let threshold = resolve_threshold(&dm, options.threshold)?;
        return Ok(CloudDiagrams {
            diagrams: implicit_diagrams(&dm, options.maxdim, threshold),
            threshold,
        });
    }
    let filtration = build_filtration(&dm, options.maxdim, options.threshold)?;
    let result = reduce(&filtration, options.reduction);
    Ok(CloudDiagrams {
        diagrams: diagrams(&result, &filtration),
        threshold: filtration.threshold(),
    })
}
