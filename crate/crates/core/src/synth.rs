//! Synthetic cohorts with known ground truth.
//!
//! Each subject is a textured volume on a fine axial grid: an ellipsoidal
//! tumor inside an ellipsoidal liver, each filled with a smoothed Gaussian
//! noise field whose amplitude ("contrast") and correlation length vary per
//! subject, plus white acquisition noise. Thick-slice reconstructions are
//! exact means of consecutive fine slices; the ASiR levels are an in-plane
//! Gaussian smoothing whose width grows linearly with the percentage. This is
//! a controllable stand-in, not a CT simulator.
//!
//! Masks are drawn on the thickest grid and resampled nearest-neighbor to the
//! thinner ones. Survival times are exponential with a log-hazard linked to
//! the subject's planted texture parameters.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::preprocess::{resample_mask, TargetSpacing};
use crate::survival::SurvivalRecord;
use crate::volume::{Geometry, ImageVolume, MaskVolume};

const THICKNESS_RTOL: f64 = 1e-9;
/// Gaussian kernels are truncated at this many standard deviations.
const KERNEL_RADIUS_SIGMAS: f64 = 4.0;
/// RNG stream used for outcomes; subject `i` uses stream `i + 1`.
const OUTCOME_STREAM: u64 = 0;

/// Log-hazard as a linear function of the planted parameters, each mapped
/// from its sampling range onto [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HazardLink {
    pub beta_contrast: f64,
    pub beta_correlation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_subjects: usize,
    pub fine_spacing_mm: f64,
    pub fine_slices: usize,
    pub thickness_levels: Vec<f64>,
    pub asir_levels: Vec<f64>,
    /// In-plane Gaussian sigma (mm) per ASiR percent.
    pub asir_sigma_mm_per_percent: f64,
    pub in_plane_dims: [usize; 2],
    pub in_plane_spacing_mm: f64,
    pub liver_radii_mm: [f64; 3],
    pub tumor_radii_mm: [f64; 3],
    /// Uniform jitter of the tumor center along each axis.
    pub tumor_jitter_mm: f64,
    pub background_hu: f64,
    pub liver_hu: f64,
    pub tumor_hu: f64,
    /// Standard deviation of the per-subject tumor mean around `tumor_hu`.
    pub tumor_hu_sd: f64,
    pub tumor_contrast_hu: (f64, f64),
    pub liver_contrast_hu: (f64, f64),
    pub correlation_mm: (f64, f64),
    pub liver_correlation_mm: f64,
    /// White noise per fine voxel.
    pub noise_hu: f64,
    /// Constant added to every voxel.
    pub offset_hu: f64,
    pub hazard: HazardLink,
    pub baseline_rate_per_day: f64,
    /// Expected fraction of censored subjects.
    pub censoring_fraction: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_subjects: 20,
            fine_spacing_mm: 0.625,
            fine_slices: 48,
            thickness_levels: vec![2.5, 3.75, 5.0],
            asir_levels: (0..7).map(|i| 10.0 * i as f64).collect(),
            asir_sigma_mm_per_percent: 0.015,
            in_plane_dims: [40, 40],
            in_plane_spacing_mm: 0.8,
            liver_radii_mm: [14.0, 14.0, 13.0],
            tumor_radii_mm: [7.0, 7.0, 6.0],
            tumor_jitter_mm: 1.5,
            background_hu: 40.0,
            liver_hu: 110.0,
            tumor_hu: 70.0,
            tumor_hu_sd: 10.0,
            tumor_contrast_hu: (8.0, 40.0),
            liver_contrast_hu: (5.0, 15.0),
            correlation_mm: (0.8, 3.0),
            liver_correlation_mm: 1.5,
            noise_hu: 12.0,
            offset_hu: 0.0,
            hazard: HazardLink::default(),
            baseline_rate_per_day: 1.0 / 900.0,
            censoring_fraction: 0.4,
            seed: 42,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64), positive: bool) -> Result<()> {
    let floor_ok = if positive { lo > 0.0 } else { lo >= 0.0 };
    if !(floor_ok && lo <= hi && hi.is_finite()) {
        return Err(Error::Spec(format!("{name} range ({lo}, {hi}) is invalid")));
    }
    Ok(())
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_subjects < 2 {
            return Err(Error::Spec(format!(
                "n_subjects must be at least 2, got {}",
                self.n_subjects
            )));
        }
        if !(self.fine_spacing_mm > 0.0) || !(self.in_plane_spacing_mm > 0.0) {
            return Err(Error::Spec("spacings must be positive".into()));
        }
        if self.fine_slices == 0 || self.in_plane_dims.contains(&0) {
            return Err(Error::Spec("grid dimensions must be positive".into()));
        }
        if self.thickness_levels.is_empty() || self.asir_levels.is_empty() {
            return Err(Error::Spec(
                "thickness and ASiR levels must be non-empty".into(),
            ));
        }
        for &t in &self.thickness_levels {
            let k = self.slab_size(t)?;
            if !self.fine_slices.is_multiple_of(k) {
                return Err(Error::Spec(format!(
                    "{} fine slices cannot be grouped into slabs of {k} for thickness {t}",
                    self.fine_slices
                )));
            }
        }
        if has_duplicates(&self.thickness_levels) || has_duplicates(&self.asir_levels) {
            return Err(Error::Spec(
                "thickness and ASiR levels must be distinct".into(),
            ));
        }
        if self
            .asir_levels
            .iter()
            .any(|a| !(*a >= 0.0 && a.is_finite()))
            || !(self.asir_sigma_mm_per_percent >= 0.0)
        {
            return Err(Error::Spec(
                "ASiR levels and smoothing must be non-negative".into(),
            ));
        }
        check_range("tumor_contrast_hu", self.tumor_contrast_hu, false)?;
        check_range("liver_contrast_hu", self.liver_contrast_hu, false)?;
        check_range("correlation_mm", self.correlation_mm, true)?;
        if !(self.liver_correlation_mm > 0.0)
            || !(self.noise_hu >= 0.0)
            || !(self.tumor_hu_sd >= 0.0)
        {
            return Err(Error::Spec("noise parameters must be non-negative".into()));
        }
        if !(self.baseline_rate_per_day > 0.0) || !(0.0..1.0).contains(&self.censoring_fraction) {
            return Err(Error::Spec(
                "baseline rate must be positive and censoring fraction in [0, 1)".into(),
            ));
        }
        let extent = self.extent_mm();
        for axis in 0..3 {
            let tumor = self.tumor_radii_mm[axis];
            let liver = self.liver_radii_mm[axis];
            if !(tumor > 0.0)
                || tumor + self.tumor_jitter_mm >= liver
                || liver >= extent[axis] / 2.0
            {
                return Err(Error::Spec(format!(
                    "geometry too small for the tumor ellipsoid on axis {axis}: tumor {tumor} + jitter {} \
                     must fit inside liver {liver}, which must fit inside half-extent {}",
                    self.tumor_jitter_mm,
                    extent[axis] / 2.0
                )));
            }
        }
        Ok(())
    }

    /// Number of fine slices averaged into one slice of thickness `t`.
    pub fn slab_size(&self, t: f64) -> Result<usize> {
        let ratio = t / self.fine_spacing_mm;
        let k = ratio.round();
        if !(k >= 1.0) || (ratio - k).abs() > THICKNESS_RTOL * ratio.max(1.0) {
            return Err(Error::Spec(format!(
                "thickness {t} is not an integer multiple of the fine spacing {}",
                self.fine_spacing_mm
            )));
        }
        Ok(k as usize)
    }

    pub fn extent_mm(&self) -> [f64; 3] {
        [
            self.in_plane_dims[0] as f64 * self.in_plane_spacing_mm,
            self.in_plane_dims[1] as f64 * self.in_plane_spacing_mm,
            self.fine_slices as f64 * self.fine_spacing_mm,
        ]
    }

    fn reference_thickness(&self) -> f64 {
        self.thickness_levels
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn geometry(&self, thickness: f64) -> Result<Geometry> {
        let k = self.slab_size(thickness)?;
        let s = self.in_plane_spacing_mm;
        // voxel centers symmetric about the physical origin
        let dims = [
            self.in_plane_dims[0],
            self.in_plane_dims[1],
            self.fine_slices / k,
        ];
        let spacing = [s, s, thickness];
        let origin = core::array::from_fn(|a| -(dims[a] as f64 - 1.0) * spacing[a] / 2.0);
        Geometry::new(dims, spacing, origin)
    }
}

fn has_duplicates(v: &[f64]) -> bool {
    v.iter().enumerate().any(|(i, a)| v[..i].contains(a))
}

pub fn subject_id(index: usize) -> String {
    format!("subj{:04}", index + 1)
}

/// The planted parameters of one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectParams {
    pub index: usize,
    pub subject_id: String,
    pub tumor_contrast_hu: f64,
    pub liver_contrast_hu: f64,
    pub correlation_mm: f64,
    pub tumor_mean_hu: f64,
    pub tumor_center_mm: [f64; 3],
}

impl SubjectParams {
    /// Log-hazard under the spec's link.
    pub fn log_hazard(&self, spec: &SynthSpec) -> f64 {
        let unit = |x: f64, (lo, hi): (f64, f64)| {
            if hi > lo {
                2.0 * (x - lo) / (hi - lo) - 1.0
            } else {
                0.0
            }
        };
        spec.hazard.beta_contrast * unit(self.tumor_contrast_hu, spec.tumor_contrast_hu)
            + spec.hazard.beta_correlation * unit(self.correlation_mm, spec.correlation_mm)
    }
}

fn subject_rng(spec: &SynthSpec, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn draw_params(spec: &SynthSpec, index: usize, rng: &mut ChaCha8Rng) -> SubjectParams {
    let tumor_contrast_hu = uniform(rng, spec.tumor_contrast_hu);
    let liver_contrast_hu = uniform(rng, spec.liver_contrast_hu);
    let correlation_mm = uniform(rng, spec.correlation_mm);
    let z: f64 = rng.sample(StandardNormal);
    let j = spec.tumor_jitter_mm;
    let tumor_center_mm = core::array::from_fn(|_| uniform(rng, (-j, j)));
    SubjectParams {
        index,
        subject_id: subject_id(index),
        tumor_contrast_hu,
        liver_contrast_hu,
        correlation_mm,
        tumor_mean_hu: spec.tumor_hu + spec.tumor_hu_sd * z,
        tumor_center_mm,
    }
}

/// Planted parameters of subject `index`, without generating its volumes.
pub fn subject_params(spec: &SynthSpec, index: usize) -> SubjectParams {
    draw_params(spec, index, &mut subject_rng(spec, index))
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub thickness_mm: f64,
    pub asir_percent: f64,
    pub image: ImageVolume,
    pub tumor: MaskVolume,
    pub liver: MaskVolume,
}

#[derive(Debug, Clone)]
pub struct SubjectVolumes {
    pub params: SubjectParams,
    /// Thickness-major, ASiR-minor, in spec order.
    pub reconstructions: Vec<Reconstruction>,
}

/// Generates every (thickness, ASiR) reconstruction of one subject.
pub fn generate_subject(spec: &SynthSpec, index: usize) -> Result<SubjectVolumes> {
    spec.validate()?;
    let mut rng = subject_rng(spec, index);
    let params = draw_params(spec, index, &mut rng);
    let fine = fine_volume(spec, &params, &mut rng);

    let reference = spec.geometry(spec.reference_thickness())?;
    let (tumor_ref, liver_ref) = masks(spec, &params, &reference);

    let [nx, ny] = spec.in_plane_dims;
    let mut reconstructions =
        Vec::with_capacity(spec.thickness_levels.len() * spec.asir_levels.len());
    for &t in &spec.thickness_levels {
        let geom = spec.geometry(t)?;
        let slab = slab_average(&fine, nx * ny, spec.slab_size(t)?);
        let tumor = regrid_mask(&tumor_ref, &geom)?;
        let liver = regrid_mask(&liver_ref, &geom)?;
        for &a in &spec.asir_levels {
            let mut data = slab.clone();
            let sigma = spec.asir_sigma_mm_per_percent * a;
            if sigma > 0.0 {
                let k = gaussian_kernel(sigma, spec.in_plane_spacing_mm);
                let dims = geom.dims;
                convolve_axis(&mut data, dims, 0, &k);
                convolve_axis(&mut data, dims, 1, &k);
            }
            reconstructions.push(Reconstruction {
                thickness_mm: t,
                asir_percent: a,
                image: ImageVolume::new(geom, data)?,
                tumor: tumor.clone(),
                liver: liver.clone(),
            });
        }
    }
    Ok(SubjectVolumes {
        params,
        reconstructions,
    })
}

fn fine_volume(spec: &SynthSpec, p: &SubjectParams, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dims = [
        spec.in_plane_dims[0],
        spec.in_plane_dims[1],
        spec.fine_slices,
    ];
    let spacing = [
        spec.in_plane_spacing_mm,
        spec.in_plane_spacing_mm,
        spec.fine_spacing_mm,
    ];
    let tumor_field = correlated_field(dims, spacing, p.correlation_mm, rng);
    let liver_field = correlated_field(dims, spacing, spec.liver_correlation_mm, rng);
    let center = |a: usize, i: usize| (i as f64 - (dims[a] as f64 - 1.0) / 2.0) * spacing[a];
    let mut out = Vec::with_capacity(tumor_field.len());
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let pos = [center(0, x), center(1, y), center(2, z)];
                let i = out.len();
                let base = if inside(pos, p.tumor_center_mm, spec.tumor_radii_mm) {
                    p.tumor_mean_hu + p.tumor_contrast_hu * tumor_field[i]
                } else if inside(pos, [0.0; 3], spec.liver_radii_mm) {
                    spec.liver_hu + p.liver_contrast_hu * liver_field[i]
                } else {
                    spec.background_hu
                };
                let noise: f64 = rng.sample(StandardNormal);
                out.push(base + spec.noise_hu * noise + spec.offset_hu);
            }
        }
    }
    out
}

fn inside(pos: [f64; 3], center: [f64; 3], radii: [f64; 3]) -> bool {
    (0..3)
        .map(|a| ((pos[a] - center[a]) / radii[a]).powi(2))
        .sum::<f64>()
        <= 1.0
}

fn masks(spec: &SynthSpec, p: &SubjectParams, geom: &Geometry) -> (MaskVolume, MaskVolume) {
    let mut tumor = MaskVolume::filled(*geom, 0);
    let mut liver = MaskVolume::filled(*geom, 0);
    let [nx, ny, nz] = geom.dims;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let pos = core::array::from_fn(|a| {
                    geom.origin[a] + [x, y, z][a] as f64 * geom.spacing[a]
                });
                if inside(pos, p.tumor_center_mm, spec.tumor_radii_mm) {
                    tumor.set(x, y, z, 1);
                } else if inside(pos, [0.0; 3], spec.liver_radii_mm) {
                    liver.set(x, y, z, 1);
                }
            }
        }
    }
    (tumor, liver)
}

/// Nearest-neighbor resampling of a reference-grid mask onto `geom`, which
/// spans the same physical extent.
fn regrid_mask(mask: &MaskVolume, geom: &Geometry) -> Result<MaskVolume> {
    if mask.geometry() == geom {
        return Ok(mask.clone());
    }
    let resampled = resample_mask(mask, TargetSpacing::Full(geom.spacing))?;
    if resampled.dims() != geom.dims {
        return Err(Error::Geometry(format!(
            "mask resampled to {:?}, expected {:?}",
            resampled.dims(),
            geom.dims
        )));
    }
    MaskVolume::new_mask(*geom, resampled.into_data())
}

fn slab_average(fine: &[f64], slice_len: usize, k: usize) -> Vec<f64> {
    let n_out = fine.len() / slice_len / k;
    let mut out = vec![0.0; n_out * slice_len];
    for (j, chunk) in out.chunks_mut(slice_len).enumerate() {
        for s in 0..k {
            let src = &fine[(j * k + s) * slice_len..][..slice_len];
            chunk.iter_mut().zip(src).for_each(|(o, v)| *o += v);
        }
        chunk.iter_mut().for_each(|o| *o /= k as f64);
    }
    out
}

fn gaussian_kernel(sigma_mm: f64, spacing_mm: f64) -> Vec<f64> {
    let radius = (KERNEL_RADIUS_SIGMAS * sigma_mm / spacing_mm).ceil() as i64;
    let w: Vec<f64> = (-radius..=radius)
        .map(|k| {
            let d = k as f64 * spacing_mm / sigma_mm;
            (-0.5 * d * d).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// In-place normalized convolution along `axis` with edge clamping.
fn convolve_axis(data: &mut [f64], dims: [usize; 3], axis: usize, kernel: &[f64]) {
    let radius = (kernel.len() / 2) as i64;
    let stride = [1, dims[0], dims[0] * dims[1]][axis];
    let n = dims[axis] as i64;
    let mut line = vec![0.0; dims[axis]];
    for base in 0..data.len() {
        if !(base / stride).is_multiple_of(dims[axis]) {
            continue;
        }
        for (i, v) in line.iter_mut().enumerate() {
            *v = data[base + i * stride];
        }
        for i in 0..n {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                let j = (i + k as i64 - radius).clamp(0, n - 1);
                acc += w * line[j as usize];
            }
            data[base + i as usize * stride] = acc;
        }
    }
}

/// Unit-variance (away from the edges) Gaussian-correlated noise.
fn correlated_field(
    dims: [usize; 3],
    spacing: [f64; 3],
    sigma_mm: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut f: Vec<f64> = (0..dims.iter().product::<usize>())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let mut gain = 1.0;
    for axis in 0..3 {
        let k = gaussian_kernel(sigma_mm, spacing[axis]);
        gain *= k.iter().map(|w| w * w).sum::<f64>();
        convolve_axis(&mut f, dims, axis, &k);
    }
    let scale = 1.0 / gain.sqrt();
    f.iter_mut().for_each(|v| *v *= scale);
    f
}

/// Exponential survival times with right censoring uniform on `[0, c]`,
/// where `c` is chosen so that the expected censored fraction matches the
/// spec.
pub fn generate_outcomes(
    spec: &SynthSpec,
    subjects: &[SubjectParams],
) -> Result<Vec<SurvivalRecord>> {
    spec.validate()?;
    let rates: Vec<f64> = subjects
        .iter()
        .map(|p| spec.baseline_rate_per_day * p.log_hazard(spec).exp())
        .collect();
    let bound = censoring_bound(&rates, spec.censoring_fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(OUTCOME_STREAM);
    let mut out = Vec::with_capacity(subjects.len());
    for (p, &rate) in subjects.iter().zip(&rates) {
        let exp = Exp::new(rate).map_err(|e| Error::Spec(format!("{e:?}")))?;
        let t = exp.sample(&mut rng).max(f64::MIN_POSITIVE);
        let c = rng.random::<f64>() * bound;
        let (time, event) = if t <= c {
            (t, true)
        } else {
            (c.max(f64::MIN_POSITIVE), false)
        };
        out.push(SurvivalRecord {
            subject_id: p.subject_id.clone(),
            time,
            event,
        });
    }
    Ok(out)
}

/// Bound `c` with mean over subjects of P(U(0, c) < T) equal to `fraction`.
fn censoring_bound(rates: &[f64], fraction: f64) -> f64 {
    if fraction <= 0.0 {
        return f64::INFINITY;
    }
    let censored = |c: f64| {
        rates
            .iter()
            .map(|&r| (1.0 - (-r * c).exp()) / (r * c))
            .sum::<f64>()
            / rates.len() as f64
    };
    // censored(c) falls from 1 to 0 as c grows; bisect in log space
    let (mut lo, mut hi) = (1e-12f64.ln(), 1e12f64.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if censored(mid.exp()) > fraction {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}
