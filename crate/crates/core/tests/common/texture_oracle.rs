//! Brute-force reference for discretization, texture matrices and all 93
//! features. Written from the definitions, independent of the production
//! engine: pairs, runs, zones and neighborhoods are found by exhaustive
//! enumeration over voxel pairs.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub const N_FEATURES: usize = 93;

/// ROI on the full (uncropped) grid. Coordinates are (x, y, z).
pub struct OracleRoi {
    pub dims: [usize; 3],
    pub ng: usize,
    /// (coordinate, level, raw value) of every ROI voxel in x-fastest order.
    pub voxels: Vec<([i64; 3], usize, f64)>,
}

pub fn discretize(dims: [usize; 3], image: &[f64], mask: &[u8], bin_count: usize) -> OracleRoi {
    let mut raw = Vec::new();
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let i = x + dims[0] * (y + dims[1] * z);
                if mask[i] == 1 {
                    raw.push(([x as i64, y as i64, z as i64], image[i]));
                }
            }
        }
    }
    let lo = raw.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = raw.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let ng = if lo == hi { 1 } else { bin_count };
    let voxels = raw
        .into_iter()
        .map(|(c, v)| {
            let level = if lo == hi {
                1
            } else {
                let w = (hi - lo) / bin_count as f64;
                let k = ((v - lo) / w).floor() as usize + 1;
                if k > bin_count {
                    bin_count
                } else {
                    k
                }
            };
            (c, level, v)
        })
        .collect();
    OracleRoi { dims, ng, voxels }
}

fn chebyshev1(a: [i64; 3], b: [i64; 3], in_plane: bool) -> bool {
    if a == b {
        return false;
    }
    if in_plane && a[2] != b[2] {
        return false;
    }
    (0..3).all(|k| (a[k] - b[k]).abs() <= 1)
}

fn sub(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Direction set: (dx, dy, dz) with the first nonzero of (dz, dy, dx) positive.
pub fn directions(three_d: bool) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for dz in -1i64..=1 {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let canonical = dz > 0 || (dz == 0 && dy > 0) || (dz == 0 && dy == 0 && dx > 0);
                if canonical && (three_d || dz == 0) {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

pub fn glcm(roi: &OracleRoi, d: [i64; 3]) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; roi.ng]; roi.ng];
    let neg = [-d[0], -d[1], -d[2]];
    for a in &roi.voxels {
        for b in &roi.voxels {
            let diff = sub(b.0, a.0);
            if diff == d || diff == neg {
                m[a.1 - 1][b.1 - 1] += 1.0;
            }
        }
    }
    m
}

fn trim(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut keep = 1;
    for c in 0..cols {
        if m.iter().any(|r| r[c] != 0.0) {
            keep = c + 1;
        }
    }
    for r in m.iter_mut() {
        r.truncate(keep);
    }
    m
}

pub fn glrlm(roi: &OracleRoi, d: [i64; 3]) -> Vec<Vec<f64>> {
    let find = |c: [i64; 3]| roi.voxels.iter().find(|v| v.0 == c).map(|v| v.1);
    // each run identified by its first voxel
    let mut runs: BTreeMap<[i64; 3], (usize, usize)> = BTreeMap::new();
    for v in &roi.voxels {
        let mut start = v.0;
        loop {
            let prev = [start[0] - d[0], start[1] - d[1], start[2] - d[2]];
            if find(prev) == Some(v.1) {
                start = prev;
            } else {
                break;
            }
        }
        let entry = runs.entry(start).or_insert((v.1, 0));
        entry.1 += 1;
    }
    let maxlen = runs.values().map(|r| r.1).max().unwrap_or(1);
    let mut m = vec![vec![0.0; maxlen]; roi.ng];
    for (_, (level, len)) in runs {
        m[level - 1][len - 1] += 1.0;
    }
    trim(m)
}

pub fn glszm(roi: &OracleRoi, in_plane: bool) -> Vec<Vec<f64>> {
    let n = roi.voxels.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut Vec<usize>, mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for a in 0..n {
        for b in 0..n {
            let (va, vb) = (&roi.voxels[a], &roi.voxels[b]);
            if va.1 == vb.1 && chebyshev1(va.0, vb.0, in_plane) {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut sizes: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for a in 0..n {
        let r = root(&mut parent, a);
        let e = sizes.entry(r).or_insert((roi.voxels[a].1, 0));
        e.1 += 1;
    }
    let maxs = sizes.values().map(|s| s.1).max().unwrap_or(1);
    let mut m = vec![vec![0.0; maxs]; roi.ng];
    for (_, (level, size)) in sizes {
        m[level - 1][size - 1] += 1.0;
    }
    trim(m)
}

pub fn gldm(roi: &OracleRoi, in_plane: bool) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; 27]; roi.ng];
    for a in &roi.voxels {
        let dep = roi
            .voxels
            .iter()
            .filter(|b| b.1 == a.1 && chebyshev1(a.0, b.0, in_plane))
            .count();
        m[a.1 - 1][dep] += 1.0;
    }
    trim(m)
}

/// Per level (n_i, s_i).
pub fn ngtdm(roi: &OracleRoi, in_plane: bool) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); roi.ng];
    for a in &roi.voxels {
        let nb: Vec<f64> = roi
            .voxels
            .iter()
            .filter(|b| chebyshev1(a.0, b.0, in_plane))
            .map(|b| b.1 as f64)
            .collect();
        out[a.1 - 1].0 += 1.0;
        if !nb.is_empty() {
            let mean = nb.iter().sum::<f64>() / nb.len() as f64;
            out[a.1 - 1].1 += (a.1 as f64 - mean).abs();
        }
    }
    out
}

fn h(ps: impl IntoIterator<Item = f64>) -> f64 {
    ps.into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

fn ok(v: f64) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

pub fn glcm_features(m: &[Vec<f64>]) -> Vec<Option<f64>> {
    let ng = m.len();
    let total: f64 = m.iter().flatten().sum();
    if total == 0.0 {
        return vec![None; 24];
    }
    let cells: Vec<(f64, f64, f64)> = (0..ng)
        .flat_map(|i| (0..ng).map(move |j| (i, j)))
        .map(|(i, j)| ((i + 1) as f64, (j + 1) as f64, m[i][j] / total))
        .collect();
    let e = |f: &dyn Fn(f64, f64) -> f64| cells.iter().map(|&(i, j, p)| f(i, j) * p).sum::<f64>();
    let ux = e(&|i, _| i);
    let uy = e(&|_, j| j);
    let vx = e(&|i, _| (i - ux).powi(2));
    let vy = e(&|_, j| (j - uy).powi(2));
    let px: Vec<f64> = (0..ng).map(|i| m[i].iter().sum::<f64>() / total).collect();
    let py: Vec<f64> = (0..ng)
        .map(|j| (0..ng).map(|i| m[i][j]).sum::<f64>() / total)
        .collect();
    let mut psum: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pdiff: BTreeMap<usize, f64> = BTreeMap::new();
    for &(i, j, p) in &cells {
        *psum.entry((i + j) as usize).or_default() += p;
        *pdiff.entry((i - j).abs() as usize).or_default() += p;
    }
    let hxy = h(cells.iter().map(|c| c.2));
    let hx = h(px.iter().copied());
    let hy = h(py.iter().copied());
    let mut hxy1 = 0.0;
    let mut hxy2 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            let q = px[i] * py[j];
            if m[i][j] > 0.0 {
                hxy1 -= m[i][j] / total * q.log2();
            }
            if q > 0.0 {
                hxy2 -= q * q.log2();
            }
        }
    }
    let da = e(&|i, j| (i - j).abs());
    let ngf = ng as f64;
    let corr = if vx > 0.0 && vy > 0.0 {
        ok(e(&|i, j| (i - ux) * (j - uy)) / (vx * vy).sqrt())
    } else {
        None
    };
    let imc1 = if hx.max(hy) > 0.0 {
        ok((hxy - hxy1) / hx.max(hy))
    } else {
        None
    };
    let gap = if hxy2 - hxy <= 1e-12 * hxy2.max(1.0) {
        0.0
    } else {
        hxy2 - hxy
    };
    let arg = 1.0 - (-2.0 * gap).exp();
    let imc2 = Some(if arg > 0.0 { arg.sqrt() } else { 0.0 });
    vec![
        Some(e(&|i, j| i * j)),
        Some(ux),
        Some(e(&|i, j| (i + j - ux - uy).powi(4))),
        Some(e(&|i, j| (i + j - ux - uy).powi(3))),
        Some(e(&|i, j| (i + j - ux - uy).powi(2))),
        Some(e(&|i, j| (i - j).powi(2))),
        corr,
        Some(da),
        Some(h(pdiff.values().copied())),
        Some(e(&|i, j| ((i - j).abs() - da).powi(2))),
        Some(cells.iter().map(|c| c.2 * c.2).sum()),
        Some(hxy),
        imc1,
        imc2,
        Some(e(&|i, j| 1.0 / (1.0 + (i - j).powi(2)))),
        mcc(m, &px, &py),
        Some(e(&|i, j| 1.0 / (1.0 + (i - j).powi(2) / (ngf * ngf)))),
        Some(e(&|i, j| 1.0 / (1.0 + (i - j).abs()))),
        Some(e(&|i, j| 1.0 / (1.0 + (i - j).abs() / ngf))),
        Some(e(&|i, j| if i == j { 0.0 } else { 1.0 / (i - j).powi(2) })),
        Some(cells.iter().map(|c| c.2).fold(0.0, f64::max)),
        Some(e(&|i, j| i + j)),
        Some(h(psum.values().copied())),
        Some(vx),
    ]
}

/// Second eigenvalue of Q via deflation (Q has eigenvalue 1 with right
/// eigenvector 1 and left eigenvector px) followed by power iteration on the
/// deflated matrix using repeated squaring.
fn mcc(m: &[Vec<f64>], px: &[f64], py: &[f64]) -> Option<f64> {
    let total: f64 = m.iter().flatten().sum();
    let rows: Vec<usize> = (0..m.len()).filter(|&i| px[i] > 0.0).collect();
    if rows.len() < 2 {
        return None;
    }
    let n = rows.len();
    let mut q = vec![vec![0.0; n]; n];
    for (a, &i) in rows.iter().enumerate() {
        for (b, &k) in rows.iter().enumerate() {
            let mut s = 0.0;
            for j in 0..m.len() {
                if py[j] > 0.0 {
                    s += (m[i][j] / total) * (m[k][j] / total) / (px[i] * py[j]);
                }
            }
            q[a][b] = s - px[k];
        }
    }
    let mul = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| {
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    };
    let mut p = q.clone();
    for _ in 0..80 {
        p = mul(&p, &p);
        let norm = p.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
        if norm == 0.0 {
            return Some(0.0);
        }
        p.iter_mut().flatten().for_each(|v| *v /= norm);
    }
    // dominant eigenvector: the largest column of p
    let col = (0..n)
        .max_by(|&a, &b| {
            let na: f64 = (0..n).map(|i| p[i][a].abs()).sum();
            let nb: f64 = (0..n).map(|i| p[i][b].abs()).sum();
            na.total_cmp(&nb)
        })
        .unwrap();
    let v: Vec<f64> = (0..n).map(|i| p[i][col]).collect();
    let qv: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| q[i][j] * v[j]).sum())
        .collect();
    let lambda =
        qv.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|b| b * b).sum::<f64>();
    Some(if lambda <= 1e-12 { 0.0 } else { lambda.sqrt() })
}

/// Shared by GLRLM/GLSZM/GLDM: entries (level, size, count).
fn size_table(m: &[Vec<f64>]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0.0 {
                out.push(((i + 1) as f64, (j + 1) as f64, c));
            }
        }
    }
    out
}

struct SizeStats {
    n: f64,
    voxels: f64,
    avg: Box<dyn Fn(&dyn Fn(f64, f64) -> f64) -> f64>,
    gln: f64,
    sn: f64,
    gv: f64,
    sv: f64,
    ent: f64,
}

fn size_stats(m: &[Vec<f64>]) -> Option<SizeStats> {
    let t = size_table(m);
    let n: f64 = t.iter().map(|e| e.2).sum();
    if n == 0.0 {
        return None;
    }
    let voxels: f64 = t.iter().map(|e| e.1 * e.2).sum();
    let mut by_level: BTreeMap<i64, f64> = BTreeMap::new();
    let mut by_size: BTreeMap<i64, f64> = BTreeMap::new();
    for &(i, j, c) in &t {
        *by_level.entry(i as i64).or_default() += c;
        *by_size.entry(j as i64).or_default() += c;
    }
    let mi: f64 = t.iter().map(|e| e.0 * e.2 / n).sum();
    let mj: f64 = t.iter().map(|e| e.1 * e.2 / n).sum();
    let gv = t.iter().map(|e| (e.0 - mi).powi(2) * e.2 / n).sum();
    let sv = t.iter().map(|e| (e.1 - mj).powi(2) * e.2 / n).sum();
    let ent = h(t.iter().map(|e| e.2 / n));
    let t2 = t.clone();
    Some(SizeStats {
        n,
        voxels,
        avg: Box::new(move |f| t2.iter().map(|e| f(e.0, e.1) * e.2).sum::<f64>() / n),
        gln: by_level.values().map(|c| c * c).sum(),
        sn: by_size.values().map(|c| c * c).sum(),
        gv,
        sv,
        ent,
    })
}

pub fn run_zone_features(m: &[Vec<f64>]) -> Vec<Option<f64>> {
    let Some(s) = size_stats(m) else {
        return vec![None; 16];
    };
    let a = &s.avg;
    vec![
        Some(a(&|_, j| 1.0 / (j * j))),
        Some(a(&|_, j| j * j)),
        Some(s.gln / s.n),
        Some(s.gln / (s.n * s.n)),
        Some(s.sn / s.n),
        Some(s.sn / (s.n * s.n)),
        Some(s.n / s.voxels),
        Some(s.gv),
        Some(s.sv),
        Some(s.ent),
        Some(a(&|i, _| 1.0 / (i * i))),
        Some(a(&|i, _| i * i)),
        Some(a(&|i, j| 1.0 / (i * i * j * j))),
        Some(a(&|i, j| i * i / (j * j))),
        Some(a(&|i, j| j * j / (i * i))),
        Some(a(&|i, j| i * i * j * j)),
    ]
}

pub fn gldm_features(m: &[Vec<f64>]) -> Vec<Option<f64>> {
    let Some(s) = size_stats(m) else {
        return vec![None; 14];
    };
    let a = &s.avg;
    vec![
        Some(a(&|_, j| 1.0 / (j * j))),
        Some(a(&|_, j| j * j)),
        Some(s.gln / s.n),
        Some(s.sn / s.n),
        Some(s.sn / (s.n * s.n)),
        Some(s.gv),
        Some(s.sv),
        Some(s.ent),
        Some(a(&|i, _| 1.0 / (i * i))),
        Some(a(&|i, _| i * i)),
        Some(a(&|i, j| 1.0 / (i * i * j * j))),
        Some(a(&|i, j| i * i / (j * j))),
        Some(a(&|i, j| j * j / (i * i))),
        Some(a(&|i, j| i * i * j * j)),
    ]
}

pub fn ngtdm_features(t: &[(f64, f64)]) -> Vec<Option<f64>> {
    let nv: f64 = t.iter().map(|e| e.0).sum();
    let lv: Vec<(f64, f64, f64)> = t
        .iter()
        .enumerate()
        .filter(|(_, e)| e.0 > 0.0)
        .map(|(i, e)| ((i + 1) as f64, e.0 / nv, e.1))
        .collect();
    let ngp = lv.len() as f64;
    let ssum: f64 = lv.iter().map(|e| e.2).sum();
    let wsum: f64 = lv.iter().map(|e| e.1 * e.2).sum();
    let mut pairs = Vec::new();
    for a in &lv {
        for b in &lv {
            pairs.push((*a, *b));
        }
    }
    let coarse = if wsum > 0.0 { Some(1.0 / wsum) } else { None };
    let contrast = if ngp > 1.0 {
        Some(
            pairs
                .iter()
                .map(|(a, b)| a.1 * b.1 * (a.0 - b.0).powi(2))
                .sum::<f64>()
                / (ngp * (ngp - 1.0))
                * ssum
                / nv,
        )
    } else {
        None
    };
    let bden: f64 = pairs
        .iter()
        .map(|(a, b)| (a.0 * a.1 - b.0 * b.1).abs())
        .sum();
    let busy = if bden > 0.0 { Some(wsum / bden) } else { None };
    let complexity = pairs
        .iter()
        .map(|(a, b)| (a.0 - b.0).abs() * (a.1 * a.2 + b.1 * b.2) / (a.1 + b.1))
        .sum::<f64>()
        / nv;
    let strength = if ssum > 0.0 {
        Some(
            pairs
                .iter()
                .map(|(a, b)| (a.1 + b.1) * (a.0 - b.0).powi(2))
                .sum::<f64>()
                / ssum,
        )
    } else {
        None
    };
    vec![coarse, contrast, busy, Some(complexity), strength]
}

fn pct(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() as f64 - 1.0);
    let i = pos.floor() as usize;
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[i] * (1.0 - (pos - i as f64)) + sorted[i + 1] * (pos - i as f64)
}

pub fn first_order(roi: &OracleRoi, voxel_volume: f64) -> Vec<Option<f64>> {
    let x: Vec<f64> = roi.voxels.iter().map(|v| v.2).collect();
    let n = x.len() as f64;
    let mut s = x.clone();
    s.sort_by(f64::total_cmp);
    let mean = x.iter().sum::<f64>() / n;
    let central = |k: i32| x.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / n;
    let var = central(2);
    let p10 = pct(&s, 10.0);
    let p90 = pct(&s, 90.0);
    let r: Vec<f64> = x
        .iter()
        .copied()
        .filter(|v| *v >= p10 && *v <= p90)
        .collect();
    let rm = r.iter().sum::<f64>() / r.len() as f64;
    let mut hist = vec![0.0; roi.ng];
    for v in &roi.voxels {
        hist[v.1 - 1] += 1.0 / n;
    }
    let energy: f64 = x.iter().map(|v| v * v).sum();
    vec![
        Some(energy),
        Some(energy * voxel_volume),
        Some(h(hist.iter().copied())),
        Some(s[0]),
        Some(p10),
        Some(p90),
        Some(s[s.len() - 1]),
        Some(mean),
        Some(pct(&s, 50.0)),
        Some(pct(&s, 75.0) - pct(&s, 25.0)),
        Some(s[s.len() - 1] - s[0]),
        Some(x.iter().map(|v| (v - mean).abs()).sum::<f64>() / n),
        if r.is_empty() {
            None
        } else {
            Some(r.iter().map(|v| (v - rm).abs()).sum::<f64>() / r.len() as f64)
        },
        Some((energy / n).sqrt()),
        if var > 0.0 {
            Some(central(3) / var.powf(1.5))
        } else {
            None
        },
        if var > 0.0 {
            Some(central(4) / (var * var))
        } else {
            None
        },
        Some(var),
        Some(hist.iter().map(|p| p * p).sum()),
    ]
}

fn mean_defined(per_dir: &[Vec<Option<f64>>], k: usize) -> Option<f64> {
    let vals: Vec<f64> = per_dir.iter().filter_map(|f| f[k]).collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// All 93 features in registry order.
pub fn features(roi: &OracleRoi, three_d: bool, voxel_volume: f64) -> Vec<Option<f64>> {
    let dirs = directions(three_d);
    let in_plane = !three_d;
    let mut out = first_order(roi, voxel_volume);
    let glcm_dir: Vec<_> = dirs.iter().map(|&d| glcm_features(&glcm(roi, d))).collect();
    out.extend((0..24).map(|k| mean_defined(&glcm_dir, k)));
    let glrlm_dir: Vec<_> = dirs
        .iter()
        .map(|&d| run_zone_features(&glrlm(roi, d)))
        .collect();
    out.extend((0..16).map(|k| mean_defined(&glrlm_dir, k)));
    out.extend(run_zone_features(&glszm(roi, in_plane)));
    out.extend(gldm_features(&gldm(roi, in_plane)));
    out.extend(ngtdm_features(&ngtdm(roi, in_plane)));
    assert_eq!(out.len(), N_FEATURES);
    out
}

/// |a - b| within `rel` of the larger magnitude, with an absolute floor for
/// values that are zero up to rounding.
pub fn close(a: Option<f64>, b: Option<f64>, rel: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => (a - b).abs() <= rel * a.abs().max(b.abs()) || (a - b).abs() <= 1e-12,
        _ => false,
    }
}

/// Deterministic random ROI: dims <= 8x8x6, n_levels <= 6. Values are
/// spatially smoothed so that runs and zones are nontrivial.
pub fn random_case(seed: u64) -> ([usize; 3], Vec<f64>, Vec<u8>, usize) {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        s
    };
    let dims = [
        1 + (next() % 8) as usize,
        1 + (next() % 8) as usize,
        1 + (next() % 6) as usize,
    ];
    let n = dims[0] * dims[1] * dims[2];
    let bins = 2 + (next() % 5) as usize;
    let density = 0.4 + (next() % 60) as f64 / 100.0;
    let levels_hint = 1.0 + (next() % 6) as f64;
    let mut image = Vec::with_capacity(n);
    let mut mask = Vec::with_capacity(n);
    let mut prev = 0.0;
    for _ in 0..n {
        let fresh = (next() % 1000) as f64 / 1000.0 * 300.0;
        let v = if next() % 3 == 0 {
            prev
        } else {
            (fresh / 300.0 * levels_hint).floor() * 300.0 / levels_hint
        };
        prev = v;
        image.push(v);
        mask.push(((next() % 1000) as f64 / 1000.0 < density) as u8);
    }
    if !mask.contains(&1) {
        mask[0] = 1;
    }
    (dims, image, mask, bins)
}
