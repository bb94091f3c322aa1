//! Single-file NIfTI-1 reading and writing for axis-aligned volumes.
//!
//! Supported payloads are uint8, int16 and float32, little-endian, with
//! optional `scl_slope`/`scl_inter` scaling and transparent gzip. Volumes
//! whose qform or sform carries a rotation are rejected; axis flips are
//! accepted and only their magnitudes are kept as spacing. Images are
//! written as float32, masks as uint8.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian as LE};
use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use radrepro_core::{Geometry, ImageVolume, MaskVolume};

const HEADER_SIZE: usize = 348;
const DATA_OFFSET: usize = 352;
const DT_UINT8: i16 = 2;
const DT_INT16: i16 = 4;
const DT_FLOAT32: i16 = 16;
/// Off-diagonal affine terms above this fraction of the largest diagonal
/// term count as a rotation.
const AXIS_ALIGNED_RTOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum NiftiError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed NIfTI header: {0}")]
    Format(String),
    #[error("unsupported orientation: {0}")]
    UnsupportedOrientation(String),
    #[error("unsupported datatype code {0} (expected uint8, int16 or float32)")]
    UnsupportedType(i16),
}

type Result<T> = std::result::Result<T, NiftiError>;

/// A decoded volume before it is typed as image or mask.
#[derive(Debug, Clone)]
pub struct RawVolume {
    pub geometry: Geometry,
    pub values: Vec<f64>,
    pub datatype: i16,
}

/// Header fields are f32; reading back through the shortest decimal that
/// round-trips the f32 keeps values such as 0.8 mm exact in f64.
fn widen(v: f32) -> f64 {
    v.to_string().parse().unwrap_or(v as f64)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut raw = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut raw)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice()).read_to_end(&mut out)?;
        return Ok(out);
    }
    Ok(raw)
}

pub fn read_raw(path: &Path) -> Result<RawVolume> {
    let bytes = read_bytes(path)?;
    if bytes.len() < HEADER_SIZE {
        return Err(NiftiError::Format(format!(
            "{} bytes is shorter than a header",
            bytes.len()
        )));
    }
    let h = &bytes[..HEADER_SIZE];
    if LE::read_i32(&h[0..4]) != HEADER_SIZE as i32 {
        return Err(NiftiError::Format(
            "sizeof_hdr is not 348 (big-endian files are not supported)".into(),
        ));
    }
    let magic = &h[344..348];
    let single_file = match magic {
        b"n+1\0" => true,
        b"ni1\0" => false,
        _ => return Err(NiftiError::Format(format!("bad magic {magic:?}"))),
    };
    let i16_at = |o: usize| LE::read_i16(&h[o..o + 2]);
    let f32_at = |o: usize| LE::read_f32(&h[o..o + 4]);

    let ndim = i16_at(40);
    if !(1..=7).contains(&ndim) {
        return Err(NiftiError::Format(format!("dim[0] = {ndim}")));
    }
    let dim: Vec<i16> = (1..=7)
        .map(|i| {
            if i <= ndim as usize {
                i16_at(40 + 2 * i)
            } else {
                1
            }
        })
        .collect();
    if dim.iter().any(|&d| d < 1) {
        return Err(NiftiError::Format(format!(
            "non-positive dimension in {dim:?}"
        )));
    }
    if dim[3..].iter().any(|&d| d != 1) {
        return Err(NiftiError::Format(format!(
            "only 3D volumes are supported, dims {dim:?}"
        )));
    }
    let dims = [dim[0] as usize, dim[1] as usize, dim[2] as usize];
    let datatype = i16_at(70);
    let width = match datatype {
        DT_UINT8 => 1,
        DT_INT16 => 2,
        DT_FLOAT32 => 4,
        other => return Err(NiftiError::UnsupportedType(other)),
    };
    let pixdim: Vec<f64> = (1..=3).map(|i| widen(f32_at(76 + 4 * i)).abs()).collect();
    let origin = orientation(h, &pixdim)?;
    let geometry = Geometry::new(dims, [pixdim[0], pixdim[1], pixdim[2]], origin)
        .map_err(|e| NiftiError::Format(e.to_string()))?;

    let n = dims.iter().product::<usize>();
    let payload: Vec<u8>;
    let data = if single_file {
        let offset = f32_at(108);
        let offset = if offset >= DATA_OFFSET as f32 {
            offset as usize
        } else {
            DATA_OFFSET
        };
        &bytes[offset.min(bytes.len())..]
    } else {
        payload = read_bytes(&path.with_extension("img"))?;
        &payload[..]
    };
    if data.len() < n * width {
        return Err(NiftiError::Format(format!(
            "payload has {} bytes, need {}",
            data.len(),
            n * width
        )));
    }
    let mut values: Vec<f64> = match datatype {
        DT_UINT8 => data[..n].iter().map(|&v| v as f64).collect(),
        DT_INT16 => data[..2 * n]
            .chunks_exact(2)
            .map(|c| LE::read_i16(c) as f64)
            .collect(),
        _ => data[..4 * n]
            .chunks_exact(4)
            .map(|c| LE::read_f32(c) as f64)
            .collect(),
    };
    let (slope, inter) = (f32_at(112) as f64, f32_at(116) as f64);
    if slope != 0.0 && slope.is_finite() && (slope != 1.0 || inter != 0.0) {
        let inter = if inter.is_finite() { inter } else { 0.0 };
        values.iter_mut().for_each(|v| *v = slope * *v + inter);
    }
    Ok(RawVolume {
        geometry,
        values,
        datatype,
    })
}

/// Origin from the sform (preferred) or qform, after checking that the
/// affine has no rotation.
fn orientation(h: &[u8], pixdim: &[f64]) -> Result<[f64; 3]> {
    let i16_at = |o: usize| LE::read_i16(&h[o..o + 2]);
    let f32_at = |o: usize| LE::read_f32(&h[o..o + 4]) as f64;
    let (qform, sform) = (i16_at(252), i16_at(254));
    let check = |m: [[f64; 3]; 3], which: &str| -> Result<()> {
        let diag = (0..3).map(|i| m[i][i].abs()).fold(0.0, f64::max);
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if r != c && v.abs() > AXIS_ALIGNED_RTOL * diag {
                    return Err(NiftiError::UnsupportedOrientation(format!(
                        "{which} has a rotation term {v} at ({r}, {c})"
                    )));
                }
            }
        }
        Ok(())
    };
    if sform > 0 {
        let row = |o: usize| [f32_at(o), f32_at(o + 4), f32_at(o + 8), f32_at(o + 12)];
        let rows = [row(280), row(296), row(312)];
        check(
            core::array::from_fn(|r| [rows[r][0], rows[r][1], rows[r][2]]),
            "sform",
        )?;
        return Ok(core::array::from_fn(|r| widen(rows[r][3] as f32)));
    }
    if qform > 0 {
        let (b, c, d) = (f32_at(256), f32_at(260), f32_at(264));
        let a = (1.0 - (b * b + c * c + d * d)).max(0.0).sqrt();
        let r = [
            [
                a * a + b * b - c * c - d * d,
                2.0 * (b * c - a * d),
                2.0 * (b * d + a * c),
            ],
            [
                2.0 * (b * c + a * d),
                a * a + c * c - b * b - d * d,
                2.0 * (c * d - a * b),
            ],
            [
                2.0 * (b * d - a * c),
                2.0 * (c * d + a * b),
                a * a + d * d - c * c - b * b,
            ],
        ];
        let scaled = core::array::from_fn(|i| core::array::from_fn(|j| r[i][j] * pixdim[j]));
        check(scaled, "qform")?;
        return Ok([
            widen(f32_at(268) as f32),
            widen(f32_at(272) as f32),
            widen(f32_at(276) as f32),
        ]);
    }
    Ok([0.0; 3])
}

pub fn read_image(path: &Path) -> Result<ImageVolume> {
    let raw = read_raw(path)?;
    ImageVolume::new(raw.geometry, raw.values).map_err(|e| NiftiError::Format(e.to_string()))
}

/// Reads a binary mask; any value other than 0 or 1 is an error.
pub fn read_mask(path: &Path) -> Result<MaskVolume> {
    let raw = read_raw(path)?;
    let mut data = Vec::with_capacity(raw.values.len());
    for v in raw.values {
        match v {
            0.0 => data.push(0),
            1.0 => data.push(1),
            other => {
                return Err(NiftiError::Format(format!(
                    "mask value {other} is not 0 or 1"
                )))
            }
        }
    }
    MaskVolume::new_mask(raw.geometry, data).map_err(|e| NiftiError::Format(e.to_string()))
}

fn header(geometry: &Geometry, datatype: i16, bitpix: i16) -> Vec<u8> {
    let mut h = vec![0u8; DATA_OFFSET];
    LE::write_i32(&mut h[0..4], HEADER_SIZE as i32);
    h[38] = b'r'; // regular
    let dims = [
        3i16,
        geometry.dims[0] as i16,
        geometry.dims[1] as i16,
        geometry.dims[2] as i16,
        1,
        1,
        1,
        1,
    ];
    for (i, d) in dims.iter().enumerate() {
        LE::write_i16(&mut h[40 + 2 * i..], *d);
    }
    LE::write_i16(&mut h[70..], datatype);
    LE::write_i16(&mut h[72..], bitpix);
    let pixdim = [
        1.0f32,
        geometry.spacing[0] as f32,
        geometry.spacing[1] as f32,
        geometry.spacing[2] as f32,
    ];
    for (i, p) in pixdim.iter().enumerate() {
        LE::write_f32(&mut h[76 + 4 * i..], *p);
    }
    LE::write_f32(&mut h[108..], DATA_OFFSET as f32);
    LE::write_f32(&mut h[112..], 1.0);
    h[123] = 2; // xyzt_units: millimetres
    LE::write_i16(&mut h[252..], 1);
    LE::write_i16(&mut h[254..], 1);
    for a in 0..3 {
        LE::write_f32(&mut h[268 + 4 * a..], geometry.origin[a] as f32);
        let row = 280 + 16 * a;
        LE::write_f32(&mut h[row + 4 * a..], geometry.spacing[a] as f32);
        LE::write_f32(&mut h[row + 12..], geometry.origin[a] as f32);
    }
    h[344..348].copy_from_slice(b"n+1\0");
    h
}

fn write_bytes(path: &Path, header: &[u8], payload: &[u8]) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let gz = path.extension().is_some_and(|e| e == "gz");
    if gz {
        let mut enc = GzEncoder::new(file, Compression::fast());
        enc.write_all(header)?;
        enc.write_all(payload)?;
        enc.finish()?.flush()?;
    } else {
        let mut file = file;
        file.write_all(header)?;
        file.write_all(payload)?;
        file.flush()?;
    }
    Ok(())
}

/// Writes an image as float32; a `.gz` extension selects gzip.
pub fn write_image(volume: &ImageVolume, path: &Path) -> Result<()> {
    let mut payload = vec![0u8; 4 * volume.data().len()];
    for (chunk, v) in payload.chunks_exact_mut(4).zip(volume.data()) {
        LE::write_f32(chunk, *v as f32);
    }
    write_bytes(path, &header(volume.geometry(), DT_FLOAT32, 32), &payload)
}

pub fn write_mask(mask: &MaskVolume, path: &Path) -> Result<()> {
    write_bytes(path, &header(mask.geometry(), DT_UINT8, 8), mask.data())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widen_recovers_decimal_spacing() {
        assert_eq!(widen(0.8f32), 0.8);
        assert_eq!(widen(3.75f32), 3.75);
        assert_eq!(widen(-15.6f32), -15.6);
    }
}
