use super::*;
use crate::error::Error;
use crate::imgcore::detect_features;
use crate::matching::{estimate_offset, OffsetOptions};
use crate::optimize::canonical_camera;

#[test]
fn single_blob_on_axis() {
    let cam = canonical_camera(500.0, 32.0, 24.0);
    let mut spec = scene_spec(vec![cam], 65, 49, 1, 0.0, 3);
    spec.region = SamplingRegion::Rect {
        x_min: 0.0,
        x_max: 0.0,
        y_min: 0.0,
        y_max: 0.0,
    };
    let (truth, images) = generate_scene(&spec).unwrap();
    assert_eq!(truth.features[0][0], Some((32.0, 24.0)));
    let feats = detect_features(&images[0], 0.01, 1, 10_000);
    assert_eq!(feats.len(), 1);
    assert!((feats[0].u - 32.0).abs() < 0.05 && (feats[0].v - 24.0).abs() < 0.05);
}

#[test]
fn subpixel_blobs_are_recovered() {
    let cams = translate_pair(800.0, 160, 120, (40, 0));
    let spec = scene_spec(cams, 160, 120, 6, 0.0, 11);
    let (truth, images) = generate_scene(&spec).unwrap();
    let feats = detect_features(&images[0], 0.02, 3, 10_000);
    for (_, (u, v)) in truth.visible(0) {
        let best = feats
            .iter()
            .map(|f| (f.u - u).hypot(f.v - v))
            .fold(f64::INFINITY, f64::min);
        // Overlapping blobs pull centroids, so only most are tight.
        assert!(best < 1.0, "feature at ({u}, {v}) missed by {best}");
    }
}

#[test]
fn zero_depth_sheet_is_flat() {
    let cams = vergence_pair(1000.0, 200, 150, (30.0, 0.0), 0.19).unwrap();
    let (truth, _) = generate_scene(&scene_spec(cams, 200, 150, 40, 0.0, 5)).unwrap();
    assert!(truth.points.iter().all(|p| p.z == 0.0));
}

#[test]
fn slab_depths_stay_inside() {
    let cams = vergence_pair(1000.0, 200, 150, (30.0, 0.0), 0.19).unwrap();
    let (truth, _) = generate_scene(&scene_spec(cams, 200, 150, 40, 20.0, 5)).unwrap();
    assert!(truth.points.iter().all(|p| p.z.abs() <= 10.0));
    assert!(truth.points.iter().any(|p| p.z.abs() > 1.0));
}

#[test]
fn translate_pair_offset_is_recovered() {
    let cams = translate_pair(1000.0, 200, 150, (57, -4));
    let spec = scene_spec(cams, 200, 150, 60, 0.0, 21);
    let (truth, images) = generate_scene(&spec).unwrap();
    assert_eq!(truth.offset, Some((57, -4)));
    let est = estimate_offset(&images[0], &images[1], &OffsetOptions::default()).unwrap();
    assert_eq!(est.offset, (57, -4));
    assert!(est.warnings.is_empty());
}

#[test]
fn tilted_cameras_have_no_exact_offset() {
    let cams = vergence_pair(1000.0, 200, 150, (30.0, 0.0), 0.19).unwrap();
    let (truth, _) = generate_scene(&scene_spec(cams, 200, 150, 5, 0.0, 1)).unwrap();
    assert_eq!(truth.offset, None);
}

#[test]
fn features_lie_inside_frames_and_match_projection() {
    let cams = vergence_pair(900.0, 180, 140, (50.0, 5.0), 0.19).unwrap();
    let mut spec = scene_spec(cams, 180, 140, 80, 20.0, 8);
    spec.region = SamplingRegion::Rect {
        x_min: -150.0,
        x_max: 150.0,
        y_min: -100.0,
        y_max: 100.0,
    };
    let (truth, _) = generate_scene(&spec).unwrap();
    let mut hidden = 0;
    for (i, cam) in truth.cameras.iter().enumerate() {
        for (j, f) in truth.features[i].iter().enumerate() {
            let p = crate::geometry::project(cam, &truth.points[j]).unwrap();
            match f {
                Some(q) => {
                    assert_eq!(*q, p);
                    assert!(q.0 >= 0.0 && q.1 >= 0.0 && q.0 <= 179.0 && q.1 <= 139.0);
                }
                None => hidden += 1,
            }
        }
    }
    assert!(hidden > 0);
}

#[test]
fn same_seed_same_bytes() {
    let cams = vergence_pair(1000.0, 120, 90, (20.0, 0.0), 0.19).unwrap();
    let mut spec = scene_spec(cams, 120, 90, 15, 10.0, 99);
    spec.noise = 0.05;
    spec.background = 0.1;
    let (t1, i1) = generate_scene(&spec).unwrap();
    let (t2, i2) = generate_scene(&spec).unwrap();
    assert_eq!(t1.to_json(), t2.to_json());
    assert_eq!(i1, i2);
    assert!(i1
        .iter()
        .all(|im| im.data().iter().all(|&x| (0.0..=1.0).contains(&x))));
    spec.seed = 100;
    let (t3, _) = generate_scene(&spec).unwrap();
    assert_ne!(t1.points, t3.points);
}

#[test]
fn truth_json_round_trip() {
    let cams = translate_pair(1000.0, 100, 80, (10, 2));
    let (truth, _) = generate_scene(&scene_spec(cams, 100, 80, 7, 4.0, 2)).unwrap();
    assert_eq!(GroundTruth::from_json(&truth.to_json()).unwrap(), truth);
}

#[test]
fn empty_view_is_an_error() {
    let cams = translate_pair(1000.0, 100, 80, (10, 2));
    let mut spec = scene_spec(cams, 100, 80, 3, 0.0, 2);
    spec.region = SamplingRegion::Rect {
        x_min: 5000.0,
        x_max: 5001.0,
        y_min: 0.0,
        y_max: 1.0,
    };
    assert!(matches!(generate_scene(&spec), Err(Error::EmptyView(0))));

    // Views that never overlap.
    let mut cams = translate_pair(1000.0, 100, 80, (0, 0));
    cams[1].pose.t.x += 10_000.0;
    let spec = scene_spec(cams, 100, 80, 3, 0.0, 2);
    assert!(matches!(generate_scene(&spec), Err(Error::EmptyView(_))));
}

#[test]
fn invalid_specs() {
    let cams = translate_pair(1000.0, 100, 80, (10, 2));
    let mut spec = scene_spec(cams, 100, 80, 3, 0.0, 2);
    spec.n_particles = 0;
    assert!(matches!(generate_scene(&spec), Err(Error::Config(_))));
    spec.n_particles = 3;
    spec.noise = -1.0;
    assert!(matches!(generate_scene(&spec), Err(Error::Config(_))));
}

#[test]
fn minimum_separation_is_respected() {
    let cams = vergence_pair(1000.0, 200, 150, (40.0, 0.0), 0.19).unwrap();
    let mut spec = scene_spec(cams, 200, 150, 30, 20.0, 4);
    spec.min_separation_px = 15.0;
    let (truth, _) = generate_scene(&spec).unwrap();
    for cam in &truth.features {
        for (a, pa) in cam.iter().enumerate() {
            for pb in &cam[a + 1..] {
                let (pa, pb) = (pa.unwrap(), pb.unwrap());
                assert!((pa.0 - pb.0).hypot(pa.1 - pb.1) >= 15.0);
            }
        }
    }
    spec.n_particles = 500;
    assert!(matches!(generate_scene(&spec), Err(Error::Config(_))));
}
