mod common;

use common::texture_oracle as oracle;
use radrepro_core::features::{
    build_texture_matrix, compute_features, Offset, Scope, TextureMatrix,
};
use radrepro_core::preprocess::{
    preprocess_roi, Aggregation, ExtractionConfig, Interpolator, Preprocessed, ZSpacing,
};
use radrepro_core::table::Family;
use radrepro_core::{Geometry, ImageVolume, MaskVolume};

const CASES: u64 = 1000;

fn production(seed: u64, aggregation: Aggregation) -> (oracle::OracleRoi, Preprocessed) {
    let (dims, image, mask, bins) = oracle::random_case(seed);
    let geom = Geometry::new(dims, [1.0, 1.0, 2.0], [0.0; 3]).unwrap();
    let img = ImageVolume::new(geom, image.clone()).unwrap();
    let m = MaskVolume::new_mask(geom, mask.clone()).unwrap();
    let config = ExtractionConfig {
        name: "oracle".into(),
        in_plane_mm: 1.0,
        z: ZSpacing::Mm(2.0),
        aggregation,
        bin_count: bins,
        resegment_window: (-1e6, 1e6),
        image_interpolator: Interpolator::BSpline3,
    };
    let prep = preprocess_roi(&img, &m, &config).unwrap();
    (oracle::discretize(dims, &image, &mask, bins), prep)
}

fn rows(m: &TextureMatrix) -> Vec<Vec<f64>> {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| m.get(r, c)).collect())
        .collect()
}

fn offset(d: [i64; 3]) -> Offset {
    Offset {
        dx: d[0],
        dy: d[1],
        dz: d[2],
    }
}

#[test]
fn matrices_match_brute_force() {
    for seed in 0..CASES {
        let (o, prep) = production(seed, Aggregation::ThreeD);
        assert_eq!(o.ng, prep.roi.n_levels(), "seed {seed}");
        for (scope, three_d) in [(Scope::Volume, true), (Scope::MergedSlices, false)] {
            for d in oracle::directions(three_d) {
                let g =
                    build_texture_matrix(&prep.roi, Family::Glcm, Some(offset(d)), scope).unwrap();
                assert_eq!(rows(&g), oracle::glcm(&o, d), "glcm seed {seed} dir {d:?}");
                let r =
                    build_texture_matrix(&prep.roi, Family::Glrlm, Some(offset(d)), scope).unwrap();
                assert_eq!(
                    rows(&r),
                    oracle::glrlm(&o, d),
                    "glrlm seed {seed} dir {d:?}"
                );
            }
            let in_plane = !three_d;
            let z = build_texture_matrix(&prep.roi, Family::Glszm, None, scope).unwrap();
            assert_eq!(rows(&z), oracle::glszm(&o, in_plane), "glszm seed {seed}");
            let dm = build_texture_matrix(&prep.roi, Family::Gldm, None, scope).unwrap();
            assert_eq!(rows(&dm), oracle::gldm(&o, in_plane), "gldm seed {seed}");
            let n = build_texture_matrix(&prep.roi, Family::Ngtdm, None, scope).unwrap();
            for (i, (cnt, s)) in oracle::ngtdm(&o, in_plane).into_iter().enumerate() {
                assert_eq!(n.get(i, 0), cnt, "ngtdm n seed {seed}");
                assert!(
                    (n.get(i, 1) - s).abs() <= 1e-12 * s.abs().max(1.0),
                    "ngtdm s seed {seed}"
                );
            }
        }
    }
}

#[test]
fn features_match_brute_force() {
    let names = radrepro_core::features::registry::all();
    for seed in 0..CASES {
        for aggregation in [Aggregation::ThreeD, Aggregation::TwoAndHalfD] {
            let (o, prep) = production(seed, aggregation);
            let got = compute_features(&prep, aggregation).unwrap();
            let want = oracle::features(&o, aggregation == Aggregation::ThreeD, prep.voxel_volume);
            for k in 0..names.len() {
                assert!(
                    oracle::close(got[k], want[k], 1e-10),
                    "seed {seed} {aggregation:?} {}: got {:?} want {:?}",
                    names[k],
                    got[k],
                    want[k]
                );
            }
        }
    }
}
