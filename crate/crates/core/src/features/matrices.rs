//! Texture matrices.
//!
//! All builders work on a [`DiscretizedRoi`]; neighbors outside the ROI (level
//! 0 or outside the bounding box) are ignored everywhere. Integer counts are
//! stored as `f64` (exact below 2^53).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::preprocess::DiscretizedRoi;
use crate::table::Family;

/// Voxel offset between neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Offset {
    pub dx: i64,
    pub dy: i64,
    pub dz: i64,
}

impl Offset {
    /// Offset written in slice-major (z, y, x) order.
    pub const fn zyx(dz: i64, dy: i64, dx: i64) -> Self {
        Self { dx, dy, dz }
    }

    pub fn is_in_plane(self) -> bool {
        self.dz == 0
    }

    fn is_unit(self) -> bool {
        let c = [self.dx, self.dy, self.dz];
        c.iter().all(|v| v.abs() <= 1) && c.iter().any(|&v| v != 0)
    }
}

/// The four unique in-plane directions, listed first so that 3D and 2.5D
/// direction averages agree on single-slice ROIs.
pub const IN_PLANE_DIRECTIONS: [Offset; 4] = [
    Offset::zyx(0, 0, 1),
    Offset::zyx(0, 1, 0),
    Offset::zyx(0, 1, 1),
    Offset::zyx(0, 1, -1),
];

/// The thirteen unique 3D directions (one per +/- pair).
pub const DIRECTIONS_3D: [Offset; 13] = [
    Offset::zyx(0, 0, 1),
    Offset::zyx(0, 1, 0),
    Offset::zyx(0, 1, 1),
    Offset::zyx(0, 1, -1),
    Offset::zyx(1, 0, 0),
    Offset::zyx(1, 0, 1),
    Offset::zyx(1, 0, -1),
    Offset::zyx(1, 1, 0),
    Offset::zyx(1, -1, 0),
    Offset::zyx(1, 1, 1),
    Offset::zyx(1, 1, -1),
    Offset::zyx(1, -1, 1),
    Offset::zyx(1, -1, -1),
];

/// Which voxels (and which neighbors) a matrix covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// One axial slice, in-plane neighbors only.
    SingleSlice(usize),
    /// All slices, in-plane neighbors only; equal to the sum of the
    /// per-slice matrices.
    MergedSlices,
    /// Whole volume with the full 3D neighborhood.
    Volume,
}

impl Scope {
    fn in_plane_only(self) -> bool {
        !matches!(self, Scope::Volume)
    }

    fn z_range(self, nz: usize) -> core::ops::Range<usize> {
        match self {
            Scope::SingleSlice(z) => z..z + 1,
            _ => 0..nz,
        }
    }

    fn neighbors(self) -> Vec<Offset> {
        let mut out = Vec::new();
        let zr: &[i64] = if self.in_plane_only() {
            &[0]
        } else {
            &[-1, 0, 1]
        };
        for &dz in zr {
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if dx != 0 || dy != 0 || dz != 0 {
                        out.push(Offset { dx, dy, dz });
                    }
                }
            }
        }
        out
    }
}

/// A dense nonnegative matrix for one texture family.
///
/// GLCM: `n_levels x n_levels`. GLRLM/GLSZM/GLDM: `n_levels x K` with column
/// `j` counting runs/zones/dependences of size `j + 1`; trailing all-zero
/// columns are trimmed (at least one column is kept). NGTDM: `n_levels x 2`
/// with column 0 = `n_i` and column 1 = `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureMatrix {
    pub family: Family,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub direction: Option<Offset>,
    pub scope: Scope,
}

impl TextureMatrix {
    fn zeros(
        family: Family,
        rows: usize,
        cols: usize,
        direction: Option<Offset>,
        scope: Scope,
    ) -> Self {
        Self {
            family,
            rows,
            cols,
            data: vec![0.0; rows * cols],
            direction,
            scope,
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    fn bump(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    fn trim_columns(mut self) -> Self {
        let mut keep = 1;
        for c in 0..self.cols {
            if (0..self.rows).any(|r| self.get(r, c) != 0.0) {
                keep = c + 1;
            }
        }
        if keep < self.cols {
            let mut data = Vec::with_capacity(self.rows * keep);
            for r in 0..self.rows {
                data.extend_from_slice(&self.data[r * self.cols..r * self.cols + keep]);
            }
            self.data = data;
            self.cols = keep;
        }
        self
    }
}

/// Builds the matrix of `family` for the ROI.
pub fn build_texture_matrix(
    roi: &DiscretizedRoi,
    family: Family,
    direction: Option<Offset>,
    scope: Scope,
) -> Result<TextureMatrix> {
    if let Scope::SingleSlice(z) = scope {
        if z >= roi.n_slices() {
            return Err(Error::Argument(format!(
                "slice {z} outside ROI with {} slices",
                roi.n_slices()
            )));
        }
    }
    match family {
        Family::Glcm | Family::Glrlm => {
            let d = direction
                .ok_or_else(|| Error::Argument(format!("{family} requires a direction")))?;
            if !d.is_unit() {
                return Err(Error::Argument(format!(
                    "direction {d:?} is not a unit neighbor offset"
                )));
            }
            if scope.in_plane_only() && !d.is_in_plane() {
                return Err(Error::Argument(format!(
                    "direction {d:?} is not in-plane for scope {scope:?}"
                )));
            }
            Ok(if family == Family::Glcm {
                glcm(roi, d, scope)
            } else {
                glrlm(roi, d, scope)
            })
        }
        Family::Glszm | Family::Gldm | Family::Ngtdm => {
            if direction.is_some() {
                return Err(Error::Argument(format!("{family} is not directional")));
            }
            Ok(match family {
                Family::Glszm => glszm(roi, scope),
                Family::Gldm => gldm(roi, scope),
                _ => ngtdm(roi, scope),
            })
        }
        Family::FirstOrder => Err(Error::Argument(
            "first-order features have no texture matrix".into(),
        )),
    }
}

fn for_each_voxel(roi: &DiscretizedRoi, scope: Scope, mut f: impl FnMut(i64, i64, i64, u16)) {
    let [nx, ny, nz] = roi.dims();
    for z in scope.z_range(nz) {
        for y in 0..ny {
            for x in 0..nx {
                let l = roi.level(x, y, z);
                if l > 0 {
                    f(x as i64, y as i64, z as i64, l);
                }
            }
        }
    }
}

/// Symmetric co-occurrence counts at distance 1 along `d`.
pub(crate) fn glcm(roi: &DiscretizedRoi, d: Offset, scope: Scope) -> TextureMatrix {
    let ng = roi.n_levels();
    let mut m = TextureMatrix::zeros(Family::Glcm, ng, ng, Some(d), scope);
    for_each_voxel(roi, scope, |x, y, z, a| {
        let b = roi.level_at(x + d.dx, y + d.dy, z + d.dz);
        if b > 0 {
            m.bump(a as usize - 1, b as usize - 1, 1.0);
            m.bump(b as usize - 1, a as usize - 1, 1.0);
        }
    });
    m
}

/// Maximal equal-level runs along `d`.
pub(crate) fn glrlm(roi: &DiscretizedRoi, d: Offset, scope: Scope) -> TextureMatrix {
    let ng = roi.n_levels();
    let dims = roi.dims();
    let max_run = dims.iter().copied().max().unwrap_or(1);
    let mut m = TextureMatrix::zeros(Family::Glrlm, ng, max_run, Some(d), scope);
    for_each_voxel(roi, scope, |x, y, z, a| {
        if roi.level_at(x - d.dx, y - d.dy, z - d.dz) == a {
            return;
        }
        let mut len = 1;
        let (mut cx, mut cy, mut cz) = (x + d.dx, y + d.dy, z + d.dz);
        while roi.level_at(cx, cy, cz) == a {
            len += 1;
            cx += d.dx;
            cy += d.dy;
            cz += d.dz;
        }
        m.bump(a as usize - 1, len - 1, 1.0);
    });
    m.trim_columns()
}

/// Equal-level connected zones (26-connected in 3D, 8-connected in-plane).
pub(crate) fn glszm(roi: &DiscretizedRoi, scope: Scope) -> TextureMatrix {
    let ng = roi.n_levels();
    let [nx, ny, _] = roi.dims();
    let neighbors = scope.neighbors();
    let mut visited = vec![false; roi.levels().len()];
    let mut sizes: Vec<(u16, usize)> = Vec::new();
    let mut stack: Vec<(i64, i64, i64)> = Vec::new();
    let idx = |x: i64, y: i64, z: i64| x as usize + nx * (y as usize + ny * z as usize);
    for_each_voxel(roi, scope, |x, y, z, a| {
        if visited[idx(x, y, z)] {
            return;
        }
        visited[idx(x, y, z)] = true;
        stack.push((x, y, z));
        let mut size = 0;
        while let Some((cx, cy, cz)) = stack.pop() {
            size += 1;
            for o in &neighbors {
                let (qx, qy, qz) = (cx + o.dx, cy + o.dy, cz + o.dz);
                if roi.level_at(qx, qy, qz) == a && !visited[idx(qx, qy, qz)] {
                    visited[idx(qx, qy, qz)] = true;
                    stack.push((qx, qy, qz));
                }
            }
        }
        sizes.push((a, size));
    });
    let max_size = sizes.iter().map(|s| s.1).max().unwrap_or(1);
    let mut m = TextureMatrix::zeros(Family::Glszm, ng, max_size, None, scope);
    for (a, s) in sizes {
        m.bump(a as usize - 1, s - 1, 1.0);
    }
    m
}

/// Dependence counts: `1 +` number of in-ROI neighbors at Chebyshev distance
/// 1 with equal level (alpha = 0).
pub(crate) fn gldm(roi: &DiscretizedRoi, scope: Scope) -> TextureMatrix {
    let ng = roi.n_levels();
    let neighbors = scope.neighbors();
    let mut m = TextureMatrix::zeros(Family::Gldm, ng, neighbors.len() + 1, None, scope);
    for_each_voxel(roi, scope, |x, y, z, a| {
        let dep = neighbors
            .iter()
            .filter(|o| roi.level_at(x + o.dx, y + o.dy, z + o.dz) == a)
            .count();
        m.bump(a as usize - 1, dep, 1.0);
    });
    m.trim_columns()
}

/// Per-level voxel counts `n_i` and summed absolute differences `s_i` between
/// each voxel's level and the mean level of its in-ROI neighbors. A voxel with
/// no in-ROI neighbor counts towards `n_i` with zero difference.
pub(crate) fn ngtdm(roi: &DiscretizedRoi, scope: Scope) -> TextureMatrix {
    let ng = roi.n_levels();
    let neighbors = scope.neighbors();
    let mut m = TextureMatrix::zeros(Family::Ngtdm, ng, 2, None, scope);
    for_each_voxel(roi, scope, |x, y, z, a| {
        let mut sum = 0u32;
        let mut cnt = 0u32;
        for o in &neighbors {
            let b = roi.level_at(x + o.dx, y + o.dy, z + o.dz);
            if b > 0 {
                sum += b as u32;
                cnt += 1;
            }
        }
        let r = a as usize - 1;
        m.bump(r, 0, 1.0);
        if cnt > 0 {
            // |a - sum/cnt| evaluated as one rounding of an exact rational
            let diff = (a as i64 * cnt as i64 - sum as i64).abs() as f64 / cnt as f64;
            m.bump(r, 1, diff);
        }
    });
    m
}

/// Sums matrices of the same family, widening columns as needed.
pub fn sum_matrices(mats: &[TextureMatrix]) -> Option<TextureMatrix> {
    let first = mats.first()?;
    let cols = mats.iter().map(|m| m.cols).max().unwrap_or(1);
    let mut out = TextureMatrix::zeros(
        first.family,
        first.rows,
        cols,
        first.direction,
        Scope::MergedSlices,
    );
    for m in mats {
        for r in 0..m.rows {
            for c in 0..m.cols {
                out.bump(r, c, m.get(r, c));
            }
        }
    }
    Some(
        if first.family == Family::Glcm || first.family == Family::Ngtdm {
            out
        } else {
            out.trim_columns()
        },
    )
}

/// Number of ROI voxels the matrix accounts for: `sum_j (j+1) P(i, j)` for
/// the run/zone families, `sum P` for GLDM, `sum n_i` for NGTDM.
pub(crate) fn covered_voxels(m: &TextureMatrix) -> f64 {
    match m.family {
        Family::Glrlm | Family::Glszm => {
            let mut s = 0.0;
            for r in 0..m.rows {
                for c in 0..m.cols {
                    s += (c + 1) as f64 * m.get(r, c);
                }
            }
            s
        }
        Family::Ngtdm => (0..m.rows).map(|r| m.get(r, 0)).sum(),
        _ => m.total(),
    }
}
