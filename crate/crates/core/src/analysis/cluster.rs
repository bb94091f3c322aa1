use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Exact optimal leaf ordering is used up to this many leaves.
pub const OLO_EXACT_MAX: usize = 2000;

/// One agglomeration step. Leaves are `0..n`; the cluster formed by merge
/// `i` is `n + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n_leaves: usize,
    /// Merges in non-decreasing height order.
    pub merges: Vec<Merge>,
    /// Leaf order, optimal when `exact_order` is set.
    pub leaf_order: Vec<usize>,
    pub exact_order: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Columns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub dendrogram: Dendrogram,
    /// Original indices of the clustered items; leaf `i` is `kept[i]`.
    pub kept: Vec<usize>,
    /// Items dropped for missing values.
    pub dropped: Vec<usize>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Ward linkage on Euclidean distances by the nearest-neighbor chain
/// algorithm with the Lance-Williams update. Merge heights follow the usual
/// convention `sqrt(2 * increase in within-cluster sum of squares)`.
pub fn ward_linkage(points: &[Vec<f64>]) -> Vec<Merge> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    // squared distances between active clusters, indexed by slot
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = sq_dist(&points[i], &points[j]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    // slot -> provisional cluster id
    let mut label: Vec<usize> = (0..n).collect();
    let mut raw: Vec<(usize, usize, f64, usize)> = Vec::with_capacity(n - 1);
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    while raw.len() < n - 1 {
        if chain.is_empty() {
            chain.push((0..n).find(|&i| active[i]).expect("active cluster"));
        }
        loop {
            let x = *chain.last().expect("chain");
            let prev = if chain.len() >= 2 {
                Some(chain[chain.len() - 2])
            } else {
                None
            };
            // nearest neighbor of x; prefer the previous chain element on ties
            let mut best = prev;
            let mut best_d = prev.map_or(f64::INFINITY, |p| d[x * n + p]);
            for y in 0..n {
                if active[y] && y != x && d[x * n + y] < best_d {
                    best = Some(y);
                    best_d = d[x * n + y];
                }
            }
            let y = best.expect("neighbor");
            if Some(y) == prev {
                chain.pop();
                chain.pop();
                let (a, b) = if x < y { (x, y) } else { (y, x) };
                let (na, nb) = (size[a] as f64, size[b] as f64);
                let dab = d[a * n + b];
                for k in 0..n {
                    if active[k] && k != a && k != b {
                        let nk = size[k] as f64;
                        let v = ((na + nk) * d[a * n + k] + (nb + nk) * d[b * n + k] - nk * dab)
                            / (na + nb + nk);
                        d[a * n + k] = v;
                        d[k * n + a] = v;
                    }
                }
                active[b] = false;
                size[a] += size[b];
                raw.push((label[a], label[b], dab.max(0.0).sqrt(), size[a]));
                label[a] = n + raw.len() - 1;
                break;
            }
            chain.push(y);
        }
    }
    relabel(n, raw)
}

/// Sorts merges by height (stable) and renumbers clusters so that merge `i`
/// creates cluster `n + i`.
fn relabel(n: usize, raw: Vec<(usize, usize, f64, usize)>) -> Vec<Merge> {
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a].2.total_cmp(&raw[b].2));
    // provisional id of each raw merge -> its leaves' union-find root
    let mut parent: Vec<usize> = (0..2 * n).collect();
    let mut cluster_of_root: Vec<usize> = (0..2 * n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    // representative leaf of every provisional id
    let mut rep = vec![0usize; 2 * n];
    for (i, r) in rep.iter_mut().enumerate().take(n) {
        *r = i;
    }
    for (k, m) in raw.iter().enumerate() {
        rep[n + k] = rep[m.0];
    }
    let mut out = Vec::with_capacity(raw.len());
    for (step, &k) in order.iter().enumerate() {
        let (pa, pb, h, s) = raw[k];
        let ra = find(&mut parent, rep[pa]);
        let rb = find(&mut parent, rep[pb]);
        let (ca, cb) = (cluster_of_root[ra], cluster_of_root[rb]);
        parent[rb] = ra;
        cluster_of_root[ra] = n + step;
        let (a, b) = if ca < cb { (ca, cb) } else { (cb, ca) };
        out.push(Merge {
            a,
            b,
            height: h,
            size: s,
        });
    }
    out
}

fn leaves_of(n: usize, merges: &[Merge], node: usize, out: &mut Vec<usize>) {
    let mut stack = vec![node];
    while let Some(v) = stack.pop() {
        if v < n {
            out.push(v);
        } else {
            let m = merges[v - n];
            stack.push(m.b);
            stack.push(m.a);
        }
    }
}

/// Leaves an order of `node` that starts at `start` can end on.
fn far_ends(
    n: usize,
    merges: &[Merge],
    leaves: &[Vec<usize>],
    node: usize,
    start: usize,
) -> Vec<usize> {
    if node < n {
        return vec![start];
    }
    let m = merges[node - n];
    if leaves[m.a].contains(&start) {
        leaves[m.b].clone()
    } else {
        leaves[m.a].clone()
    }
}

/// Leaf order minimizing the sum of distances between adjacent leaves among
/// all orders consistent with the dendrogram (exact dynamic program over
/// leaf pairs, O(n^3)).
pub fn optimal_leaf_order(points: &[Vec<f64>], merges: &[Merge]) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = sq_dist(&points[i], &points[j]).sqrt();
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    // cost[u*n+w]: best cost of an order of lca(u,w) starting at u, ending at w
    let mut cost = vec![0.0; n * n];
    let mut leaves: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for m in merges {
        let left = leaves[m.a].clone();
        let right = leaves[m.b].clone();
        // best[u][k]: min over ends m of left starting at u of cost(u,m) + d(m,k)
        let mut best_lk = vec![f64::INFINITY; left.len() * right.len()];
        for (iu, &u) in left.iter().enumerate() {
            let lm = far_ends(n, merges, &leaves, m.a, u);
            for (ik, &k) in right.iter().enumerate() {
                let mut b = f64::INFINITY;
                for &e in &lm {
                    b = b.min(cost[u * n + e] + dist[e * n + k]);
                }
                best_lk[iu * right.len() + ik] = b;
            }
        }
        for &w in &right {
            let rk = far_ends(n, merges, &leaves, m.b, w);
            let rk_idx: Vec<usize> = rk
                .iter()
                .map(|k| right.iter().position(|r| r == k).expect("leaf"))
                .collect();
            for (iu, &u) in left.iter().enumerate() {
                let mut b = f64::INFINITY;
                for (&k, &ik) in rk.iter().zip(&rk_idx) {
                    b = b.min(best_lk[iu * right.len() + ik] + cost[k * n + w]);
                }
                cost[u * n + w] = b;
                cost[w * n + u] = b;
            }
        }
        let mut all = left;
        all.extend(right);
        leaves.push(all);
    }

    // reconstruct
    let root = n + merges.len() - 1;
    let rm = merges[root - n];
    let (mut bu, mut bw, mut bc) = (0, 0, f64::INFINITY);
    for &u in &leaves[rm.a] {
        for &w in &leaves[rm.b] {
            if cost[u * n + w] < bc {
                (bu, bw, bc) = (u, w, cost[u * n + w]);
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    // (node, first leaf, last leaf)
    let mut stack = vec![(root, bu, bw)];
    while let Some((v, u, w)) = stack.pop() {
        if v < n {
            order.push(v);
            continue;
        }
        let m = merges[v - n];
        // orient so that u lies in the first child
        let (first, second) = if leaves[m.a].contains(&u) {
            (m.a, m.b)
        } else {
            (m.b, m.a)
        };
        let (mut be, mut bk, mut bc) = (u, w, f64::INFINITY);
        for &e in &far_ends(n, merges, &leaves, first, u) {
            for &k in &far_ends(n, merges, &leaves, second, w) {
                let c = cost[u * n + e] + dist[e * n + k] + cost[k * n + w];
                if c < bc {
                    (be, bk, bc) = (e, k, c);
                }
            }
        }
        // second child is processed after the first
        stack.push((second, bk, w));
        stack.push((first, u, be));
    }
    order
}

/// Ward clustering of the rows (or columns) of a matrix with optional
/// entries. Items with any missing entry are dropped and reported.
pub fn ward_cluster(matrix: &[Vec<Option<f64>>], axis: Axis) -> Result<Clustering> {
    let items: Vec<Vec<Option<f64>>> = match axis {
        Axis::Rows => matrix.to_vec(),
        Axis::Columns => {
            let cols = matrix.first().map_or(0, |r| r.len());
            if matrix.iter().any(|r| r.len() != cols) {
                return Err(Error::Argument("ragged matrix".into()));
            }
            (0..cols)
                .map(|c| matrix.iter().map(|r| r[c]).collect())
                .collect()
        }
    };
    let width = items.first().map_or(0, |r| r.len());
    if items.iter().any(|r| r.len() != width) {
        return Err(Error::Argument("ragged matrix".into()));
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut points = Vec::new();
    for (i, r) in items.iter().enumerate() {
        match r
            .iter()
            .map(|v| v.filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
        {
            Some(p) => {
                kept.push(i);
                points.push(p);
            }
            None => dropped.push(i),
        }
    }
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} complete item(s), need at least 2",
            points.len()
        )));
    }
    let merges = ward_linkage(&points);
    let n = points.len();
    let (leaf_order, exact_order) = if n <= OLO_EXACT_MAX {
        (optimal_leaf_order(&points, &merges), true)
    } else {
        let mut order = Vec::with_capacity(n);
        leaves_of(n, &merges, n + merges.len() - 1, &mut order);
        (order, false)
    };
    Ok(Clustering {
        dendrogram: Dendrogram {
            n_leaves: n,
            merges,
            leaf_order,
            exact_order,
        },
        kept,
        dropped,
    })
}
