use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::volume::{check_same_geometry, ImageVolume, MaskVolume};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

#[derive(Debug, Clone)]
pub struct Resegmented {
    pub mask: MaskVolume,
    pub removed: usize,
}

/// Drops ROI voxels whose intensity lies outside the closed window `[lo, hi]`.
pub fn resegment(
    image: &ImageVolume,
    mask: &MaskVolume,
    window: (f64, f64),
) -> Result<Resegmented> {
    check_same_geometry(image.geometry(), mask.geometry())?;
    let (lo, hi) = window;
    let mut out = mask.clone();
    let mut removed = 0;
    let mut kept = 0;
    for (m, &v) in out.data_mut().iter_mut().zip(image.data()) {
        if *m != 0 {
            if v >= lo && v <= hi {
                kept += 1;
            } else {
                *m = 0;
                removed += 1;
            }
        }
    }
    if kept == 0 {
        return Err(Error::EmptyRoi(format!(
            "no ROI voxel inside window [{lo}, {hi}]"
        )));
    }
    Ok(Resegmented { mask: out, removed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Gray levels of an ROI, cropped to its bounding box.
///
/// `levels` uses 0 for voxels outside the ROI and `1..=n_levels` inside.
/// Axis 2 is the slice axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedRoi {
    dims: [usize; 3],
    levels: Vec<u16>,
    n_levels: usize,
    voxel_count: usize,
    stats: IntensityStats,
}

impl DiscretizedRoi {
    /// Builds an ROI directly from a level grid (0 = outside).
    pub fn from_levels(dims: [usize; 3], levels: Vec<u16>, n_levels: usize) -> Result<Self> {
        if levels.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::Geometry(format!(
                "level grid length does not match dims {dims:?}"
            )));
        }
        if let Some(&l) = levels.iter().find(|&&l| l as usize > n_levels) {
            return Err(Error::Argument(format!(
                "level {l} exceeds n_levels {n_levels}"
            )));
        }
        let voxel_count = levels.iter().filter(|&&l| l > 0).count();
        if voxel_count == 0 {
            return Err(Error::EmptyRoi("level grid has no ROI voxel".into()));
        }
        let vals: Vec<f64> = levels
            .iter()
            .filter(|&&l| l > 0)
            .map(|&l| l as f64)
            .collect();
        let stats = IntensityStats {
            min: vals.iter().cloned().fold(f64::INFINITY, f64::min),
            max: vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            mean: vals.iter().sum::<f64>() / vals.len() as f64,
        };
        Ok(Self {
            dims,
            levels,
            n_levels,
            voxel_count,
            stats,
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn levels(&self) -> &[u16] {
        &self.levels
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn voxel_count(&self) -> usize {
        self.voxel_count
    }

    pub fn n_slices(&self) -> usize {
        self.dims[2]
    }

    pub fn intensity_stats(&self) -> IntensityStats {
        self.stats
    }

    #[inline]
    pub fn level(&self, x: usize, y: usize, z: usize) -> u16 {
        self.levels[x + self.dims[0] * (y + self.dims[1] * z)]
    }

    /// Level at a signed coordinate, 0 when outside the grid.
    #[inline]
    pub fn level_at(&self, x: i64, y: i64, z: i64) -> u16 {
        if x < 0 || y < 0 || z < 0 {
            return 0;
        }
        let (x, y, z) = (x as usize, y as usize, z as usize);
        if x >= self.dims[0] || y >= self.dims[1] || z >= self.dims[2] {
            return 0;
        }
        self.level(x, y, z)
    }

    /// Histogram of levels, index 0 for level 1.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.n_levels];
        for &l in &self.levels {
            if l > 0 {
                h[l as usize - 1] += 1;
            }
        }
        h
    }
}

/// Fixed-bin-count discretization over the ROI's own [min, max].
///
/// `w = (max - min) / bin_count`, `level = min(floor((v - min) / w) + 1, bin_count)`.
/// A constant ROI gets the single level 1.
pub fn discretize(
    image: &ImageVolume,
    mask: &MaskVolume,
    bin_count: usize,
) -> Result<DiscretizedRoi> {
    check_same_geometry(image.geometry(), mask.geometry())?;
    if bin_count < 1 {
        return Err(Error::Argument("bin_count must be positive".into()));
    }
    let g = image.geometry();
    let [nx, ny, nz] = g.dims;
    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = g.index(x, y, z);
                if mask.data()[i] != 0 {
                    let v = image.data()[i];
                    min = min.min(v);
                    max = max.max(v);
                    sum += v;
                    count += 1;
                    for (a, c) in [x, y, z].into_iter().enumerate() {
                        lo[a] = lo[a].min(c);
                        hi[a] = hi[a].max(c);
                    }
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptyRoi("mask has no voxels".into()));
    }
    let dims = [hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1];
    let constant = max == min;
    let n_levels = if constant { 1 } else { bin_count };
    let width = (max - min) / bin_count as f64;
    let mut levels = vec![0u16; dims[0] * dims[1] * dims[2]];
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let i = g.index(x + lo[0], y + lo[1], z + lo[2]);
                if mask.data()[i] != 0 {
                    let level = if constant {
                        1
                    } else {
                        (((image.data()[i] - min) / width).floor() as usize + 1).min(bin_count)
                    };
                    levels[x + dims[0] * (y + dims[1] * z)] = level as u16;
                }
            }
        }
    }
    Ok(DiscretizedRoi {
        dims,
        levels,
        n_levels,
        voxel_count: count,
        stats: IntensityStats {
            min,
            max,
            mean: sum / count as f64,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{Geometry, Volume};

    fn line(values: &[f64]) -> (ImageVolume, MaskVolume) {
        let g = Geometry::new([values.len(), 1, 1], [1.0; 3], [0.0; 3]).unwrap();
        (
            Volume::new(g, values.to_vec()).unwrap(),
            Volume::filled(g, 1u8),
        )
    }

    #[test]
    fn one_level_per_value() {
        let vals: Vec<f64> = (0..24).map(|v| v as f64).collect();
        let (img, mask) = line(&vals);
        let roi = discretize(&img, &mask, 24).unwrap();
        let got: Vec<u16> = roi.levels().to_vec();
        let want: Vec<u16> = (1..=24).collect();
        assert_eq!(got, want);
        assert_eq!(roi.n_levels(), 24);
    }

    #[test]
    fn constant_roi_single_level() {
        let (img, mask) = line(&[100.0; 5]);
        let roi = discretize(&img, &mask, 24).unwrap();
        assert_eq!(roi.n_levels(), 1);
        assert!(roi.levels().iter().all(|&l| l == 1));
    }

    #[test]
    fn max_value_clamped_to_top_bin() {
        let (img, mask) = line(&[-3.0, 0.1, 7.0]);
        let roi = discretize(&img, &mask, 4).unwrap();
        assert_eq!(roi.levels()[2], 4);
        assert_eq!(roi.levels()[0], 1);
    }

    #[test]
    fn resegment_window() {
        let (img, mask) = line(&[0.0, 100.0, 200.0]);
        let r = resegment(&img, &mask, (-50.0, 350.0)).unwrap();
        assert_eq!(r.removed, 0);
        assert_eq!(r.mask, mask);

        let (img, mask) = line(&[0.0, 400.0, 200.0]);
        let r = resegment(&img, &mask, (-50.0, 350.0)).unwrap();
        assert_eq!(r.removed, 1);
        assert_eq!(r.mask.data(), &[1, 0, 1]);
        let again = resegment(&img, &r.mask, (-50.0, 350.0)).unwrap();
        assert_eq!(again.mask, r.mask);
        assert_eq!(again.removed, 0);

        let (img, mask) = line(&[-1000.0; 4]);
        assert!(matches!(
            resegment(&img, &mask, (-50.0, 350.0)),
            Err(Error::EmptyRoi(_))
        ));
    }

    #[test]
    fn crops_to_bounding_box() {
        let g = Geometry::new([4, 4, 3], [1.0; 3], [0.0; 3]).unwrap();
        let img = Volume::new(g, (0..48).map(|v| v as f64).collect()).unwrap();
        let mut mask = Volume::filled(g, 0u8);
        mask.set(1, 1, 1, 1);
        mask.set(2, 2, 1, 1);
        let roi = discretize(&img, &mask, 8).unwrap();
        assert_eq!(roi.dims(), [2, 2, 1]);
        assert_eq!(roi.voxel_count(), 2);
        assert_eq!(roi.level(0, 0, 0), 1);
        assert_eq!(roi.level(1, 1, 0), 8);
        assert_eq!(roi.level(1, 0, 0), 0);
    }
}
