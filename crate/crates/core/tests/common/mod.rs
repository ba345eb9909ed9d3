//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tda_core::cloud::PointCloud;
use tda_core::persistence::PersistenceDiagram;

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn random_cloud(rng: &mut ChaCha8Rng, points: usize, dim: usize) -> PointCloud {
    let coords = (0..points * dim).map(|_| rng.gen::<f64>()).collect();
    PointCloud::new(dim, coords)
}

/// Edge weights of a minimum spanning tree (Prim, dense).
pub fn mst_weights(cloud: &PointCloud) -> Vec<f64> {
    let n = cloud.len();
    if n == 0 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut weights = Vec::with_capacity(n - 1);
    best[0] = 0.0;
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[v] = true;
        if step > 0 {
            weights.push(best[v]);
        }
        for u in 0..n {
            if !in_tree[u] {
                best[u] = best[u].min(euclid(cloud.point(u), cloud.point(v)));
            }
        }
    }
    weights.sort_by(f64::total_cmp);
    weights
}

/// Rank over GF(2) of a set of bit vectors.
fn rank(vectors: impl IntoIterator<Item = u128>) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Kernel basis of the linear map sending generator `i` to `images[i]`.
/// Kernel vectors are bit sets over generator indices.
fn kernel(images: &[u128]) -> Vec<u128> {
    let mut pivots: Vec<(u128, u128)> = Vec::new();
    let mut out = Vec::new();
    for (i, &img) in images.iter().enumerate() {
        let (mut v, mut combo) = (img, 1u128 << i);
        for &(b, c) in &pivots {
            if v ^ b < v {
                v ^= b;
                combo ^= c;
            }
        }
        if v == 0 {
            out.push(combo);
        } else {
            pivots.push((v, combo));
            pivots.sort_unstable_by_key(|p| std::cmp::Reverse(p.0));
        }
    }
    out
}

/// H1 diagram of the full Rips 2-skeleton by persistent Betti numbers at every
/// pair of distinct filtration values. Points are `(birth, death)`, death may be infinite.
pub fn brute_force_h1(cloud: &PointCloud) -> Vec<(f64, f64)> {
    let n = cloud.len();
    assert!(n <= 10);
    let d = |i: usize, j: usize| euclid(cloud.point(i), cloud.point(j));
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, d(i, j)));
        }
    }
    let edge_id = |i: usize, j: usize| edges.iter().position(|e| e.0 == i && e.1 == j).unwrap();
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let value = d(i, j).max(d(i, k)).max(d(j, k));
                let boundary =
                    (1u128 << edge_id(i, j)) | (1u128 << edge_id(i, k)) | (1u128 << edge_id(j, k));
                triangles.push((boundary, value));
            }
        }
    }
    let mut values: Vec<f64> = edges.iter().map(|e| e.2).chain([0.0]).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let m = values.len();

    // cycle space of the graph at each value
    let cycles: Vec<Vec<u128>> = values
        .iter()
        .map(|&s| {
            let live: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].2 <= s).collect();
            let images: Vec<u128> = live
                .iter()
                .map(|&e| (1u128 << edges[e].0) | (1u128 << edges[e].1))
                .collect();
            kernel(&images)
                .into_iter()
                .map(|combo| {
                    live.iter()
                        .enumerate()
                        .filter(|(k, _)| combo >> k & 1 == 1)
                        .fold(0u128, |acc, (_, &e)| acc | 1u128 << e)
                })
                .collect()
        })
        .collect();
    let boundaries: Vec<Vec<u128>> = values
        .iter()
        .map(|&t| {
            triangles
                .iter()
                .filter(|tr| tr.1 <= t)
                .map(|tr| tr.0)
                .collect()
        })
        .collect();

    // classes born at or before values[s] and still alive at values[t]
    let beta = |s: Option<usize>, t: usize| -> i64 {
        let Some(s) = s else { return 0 };
        let z = &cycles[s];
        let b = &boundaries[t];
        let dim_z = z.len() as i64;
        let dim_b = rank(b.iter().copied()) as i64;
        let dim_sum = rank(z.iter().chain(b.iter()).copied()) as i64;
        dim_z - (dim_z + dim_b - dim_sum)
    };
    let mut out = Vec::new();
    for i in 0..m {
        let prev = i.checked_sub(1);
        for j in i + 1..m {
            let mult = beta(Some(i), j - 1) - beta(Some(i), j) - beta(prev, j - 1) + beta(prev, j);
            assert!(mult >= 0);
            for _ in 0..mult {
                out.push((values[i], values[j]));
            }
        }
        let essential = beta(Some(i), m - 1) - beta(prev, m - 1);
        for _ in 0..essential {
            out.push((values[i], f64::INFINITY));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

pub fn bars(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.points().iter().map(|p| (p.birth, p.death)).collect()
}

fn tent(b: f64, d: f64, x: f64) -> f64 {
    (x - b).min(d - x).max(0.0)
}

/// Trapezoid-rule `(L1, L2)` landscape norms on a uniform grid of `cells` cells,
/// evaluating each level as the k-th largest tent value.
pub fn quadrature_norms(bars: &[(f64, f64)], cells: usize) -> (f64, f64) {
    if bars.is_empty() {
        return (0.0, 0.0);
    }
    let lo = bars.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let hi = bars.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    let h = (hi - lo) / cells as f64;
    let mut heights = vec![0.0; bars.len()];
    let (mut l1, mut l2) = (0.0, 0.0);
    for i in 0..=cells {
        let x = lo + h * i as f64;
        for (slot, &(b, d)) in heights.iter_mut().zip(bars) {
            *slot = tent(b, d, x);
        }
        heights.sort_by(|a, b| b.total_cmp(a));
        let w = if i == 0 || i == cells { 0.5 } else { 1.0 };
        for &y in &heights {
            l1 += w * h * y;
            l2 += w * h * y * y;
        }
    }
    (l1, l2.sqrt())
}

/// k-th largest tent value at `x` (k from 1).
pub fn kth_tent(bars: &[(f64, f64)], k: usize, x: f64) -> f64 {
    let mut heights: Vec<f64> = bars.iter().map(|&(b, d)| tent(b, d, x)).collect();
    heights.sort_by(|a, b| b.total_cmp(a));
    heights.get(k - 1).copied().unwrap_or(0.0)
}

/// `Σ cost^p` of the cheapest partial matching, by enumerating every injection.
pub fn exhaustive_wasserstein_cost(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    fn sup(x: (f64, f64), y: (f64, f64)) -> f64 {
        (x.0 - y.0).abs().max((x.1 - y.1).abs())
    }
    fn diag(x: (f64, f64)) -> f64 {
        (x.1 - x.0) / 2.0
    }
    fn go(a: &[(f64, f64)], b: &[(f64, f64)], p: f64, i: usize, used: &mut Vec<bool>) -> f64 {
        if i == a.len() {
            return b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&y, _)| diag(y).powf(p))
                .sum();
        }
        let mut best = diag(a[i]).powf(p) + go(a, b, p, i + 1, used);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(sup(a[i], b[j]).powf(p) + go(a, b, p, i + 1, used));
                used[j] = false;
            }
        }
        best
    }
    go(a, b, p, 0, &mut vec![false; b.len()])
}

/// Moves every point by a random vector of Euclidean length at most `delta`.
pub fn jitter(rng: &mut ChaCha8Rng, cloud: &PointCloud, delta: f64) -> PointCloud {
    let dim = cloud.dim();
    let mut coords = Vec::with_capacity(cloud.len() * dim);
    for p in cloud.points() {
        let dir: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        let norm = dir
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        let len = delta * rng.gen::<f64>();
        coords.extend(p.iter().zip(&dir).map(|(x, u)| x + u / norm * len));
    }
    PointCloud::new(dim, coords)
}
