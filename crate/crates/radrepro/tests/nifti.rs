use std::io::Write;
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;
use radrepro::nifti::{read_image, read_mask, read_raw, write_image, write_mask, NiftiError};
use radrepro_core::{Geometry, ImageVolume, MaskVolume};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A single-file header written field by field.
struct Header {
    dims: [i16; 3],
    datatype: i16,
    bitpix: i16,
    pixdim: [f32; 3],
    slope: f32,
    inter: f32,
    sform: Option<[[f32; 4]; 3]>,
    qform: Option<([f32; 3], [f32; 3], f32)>,
}

impl Header {
    fn bytes(&self) -> Vec<u8> {
        let mut h = vec![0u8; 352];
        let put_i16 =
            |h: &mut [u8], o: usize, v: i16| h[o..o + 2].copy_from_slice(&v.to_le_bytes());
        let put_f32 =
            |h: &mut [u8], o: usize, v: f32| h[o..o + 4].copy_from_slice(&v.to_le_bytes());
        h[0..4].copy_from_slice(&348i32.to_le_bytes());
        put_i16(&mut h, 40, 3);
        for (i, d) in self.dims.iter().enumerate() {
            put_i16(&mut h, 42 + 2 * i, *d);
        }
        for i in 3..7 {
            put_i16(&mut h, 42 + 2 * i, 1);
        }
        put_i16(&mut h, 70, self.datatype);
        put_i16(&mut h, 72, self.bitpix);
        put_f32(&mut h, 76, 1.0);
        for (i, p) in self.pixdim.iter().enumerate() {
            put_f32(&mut h, 80 + 4 * i, *p);
        }
        put_f32(&mut h, 108, 352.0);
        put_f32(&mut h, 112, self.slope);
        put_f32(&mut h, 116, self.inter);
        if let Some((bcd, offset, qfac)) = self.qform {
            put_i16(&mut h, 252, 1);
            for i in 0..3 {
                put_f32(&mut h, 256 + 4 * i, bcd[i]);
                put_f32(&mut h, 268 + 4 * i, offset[i]);
            }
            put_f32(&mut h, 76, qfac);
        }
        if let Some(rows) = self.sform {
            put_i16(&mut h, 254, 1);
            for (r, row) in rows.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    put_f32(&mut h, 280 + 16 * r + 4 * c, *v);
                }
            }
        }
        h[344..348].copy_from_slice(b"n+1\0");
        h
    }
}

fn write_file(path: &Path, bytes: &[u8], gz: bool) {
    let mut f = std::fs::File::create(path).unwrap();
    if gz {
        let mut e = GzEncoder::new(f, Compression::fast());
        e.write_all(bytes).unwrap();
        e.finish().unwrap();
    } else {
        f.write_all(bytes).unwrap();
    }
}

fn diagonal_sform(spacing: [f32; 3], origin: [f32; 3]) -> [[f32; 4]; 3] {
    core::array::from_fn(|r| {
        let mut row = [0.0; 4];
        row[r] = spacing[r];
        row[3] = origin[r];
        row
    })
}

#[test]
fn int16_with_scaling_is_decoded_by_hand_built_header() {
    let dir = tempfile::tempdir().unwrap();
    let header = Header {
        dims: [3, 2, 2],
        datatype: 4,
        bitpix: 16,
        pixdim: [0.8, 0.8, 2.5],
        slope: 2.0,
        inter: -1.0,
        sform: Some(diagonal_sform([0.8, 0.8, 2.5], [-10.0, 4.5, 30.0])),
        qform: None,
    };
    let stored: Vec<i16> = (0..12).map(|i| i * 7 - 40).collect();
    let mut bytes = header.bytes();
    for v in &stored {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    for gz in [false, true] {
        let path = dir.path().join(if gz { "a.nii.gz" } else { "a.nii" });
        write_file(&path, &bytes, gz);
        let img = read_image(&path).unwrap();
        assert_eq!(img.dims(), [3, 2, 2]);
        assert_eq!(img.spacing(), [0.8, 0.8, 2.5]);
        assert_eq!(img.geometry().origin, [-10.0, 4.5, 30.0]);
        let expected: Vec<f64> = stored.iter().map(|&v| 2.0 * v as f64 - 1.0).collect();
        assert_eq!(img.data(), &expected[..]);
    }
}

#[test]
fn qform_translation_is_used_without_sform() {
    let dir = tempfile::tempdir().unwrap();
    let header = Header {
        dims: [2, 2, 1],
        datatype: 2,
        bitpix: 8,
        pixdim: [1.0, 1.0, 5.0],
        slope: 0.0,
        inter: 0.0,
        sform: None,
        qform: Some(([0.0; 3], [1.5, -2.0, 7.0], 1.0)),
    };
    let mut bytes = header.bytes();
    bytes.extend_from_slice(&[0, 1, 1, 0]);
    let path = dir.path().join("m.nii");
    write_file(&path, &bytes, false);
    let mask = read_mask(&path).unwrap();
    assert_eq!(mask.geometry().origin, [1.5, -2.0, 7.0]);
    assert_eq!(mask.data(), &[0, 1, 1, 0]);
}

#[test]
fn rotated_affines_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut sform = diagonal_sform([1.0, 1.0, 1.0], [0.0; 3]);
    sform[0][1] = 0.3;
    let rotated = Header {
        dims: [2, 2, 2],
        datatype: 16,
        bitpix: 32,
        pixdim: [1.0, 1.0, 1.0],
        slope: 1.0,
        inter: 0.0,
        sform: Some(sform),
        qform: None,
    };
    let mut bytes = rotated.bytes();
    bytes.extend(std::iter::repeat_n(0u8, 32));
    let path = dir.path().join("r.nii");
    write_file(&path, &bytes, false);
    assert!(matches!(
        read_raw(&path),
        Err(NiftiError::UnsupportedOrientation(_))
    ));

    // 30 degrees about z as a quaternion
    let half = 15f32.to_radians();
    let q = Header {
        sform: None,
        qform: Some(([0.0, 0.0, half.sin()], [0.0; 3], 1.0)),
        ..rotated
    };
    let mut bytes = q.bytes();
    bytes.extend(std::iter::repeat_n(0u8, 32));
    write_file(&path, &bytes, false);
    assert!(matches!(
        read_raw(&path),
        Err(NiftiError::UnsupportedOrientation(_))
    ));
}

#[test]
fn unsupported_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.nii");
    write_file(&path, b"not a nifti file", false);
    assert!(matches!(read_raw(&path), Err(NiftiError::Format(_))));

    let f64_header = Header {
        dims: [1, 1, 1],
        datatype: 64,
        bitpix: 64,
        pixdim: [1.0; 3],
        slope: 1.0,
        inter: 0.0,
        sform: None,
        qform: None,
    };
    let mut bytes = f64_header.bytes();
    bytes.extend_from_slice(&[0; 8]);
    write_file(&path, &bytes, false);
    assert!(matches!(
        read_raw(&path),
        Err(NiftiError::UnsupportedType(64))
    ));

    let mask_header = Header {
        datatype: 2,
        bitpix: 8,
        ..f64_header
    };
    let mut bytes = mask_header.bytes();
    bytes.push(3);
    write_file(&path, &bytes, false);
    assert!(read_image(&path).is_ok());
    assert!(matches!(read_mask(&path), Err(NiftiError::Format(_))));

    let missing = dir.path().join("missing.nii.gz");
    assert!(matches!(read_raw(&missing), Err(NiftiError::Io(_))));
}

#[test]
fn image_and_mask_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let geometry = Geometry::new([41, 41, 11], [0.8, 0.8, 3.75], [-16.0, -16.0, -18.75]).unwrap();
    let values: Vec<f64> = (0..geometry.len())
        .map(|_| rng.random_range(-100.0..100.0))
        .collect();
    let image = ImageVolume::new(geometry, values).unwrap();
    let bits: Vec<u8> = (0..geometry.len())
        .map(|_| rng.random_bool(0.3) as u8)
        .collect();
    let mask = MaskVolume::new_mask(geometry, bits).unwrap();
    for name in ["img.nii", "img.nii.gz"] {
        let path = dir.path().join(name);
        write_image(&image, &path).unwrap();
        let back = read_image(&path).unwrap();
        assert_eq!(back.geometry(), image.geometry());
        for (a, b) in back.data().iter().zip(image.data()) {
            assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
        }
    }
    let path = dir.path().join("mask.nii.gz");
    write_mask(&mask, &path).unwrap();
    let back = read_mask(&path).unwrap();
    assert_eq!(back, mask);
}
