mod common;

use common::*;
use lasersheet::imgcore::detect_features;
use lasersheet::matching::{estimate_offset, pair_correspondences, OffsetOptions};
use lasersheet::optimize::{
    initial_guess_from_cameras, BundleOptions, BundleProblem, SheetModel, SolverOptions, SurfaceConstraint,
};
use lasersheet::synth::{generate_scene, scene_spec, vergence_pair};

fn spec(seed: u64) -> lasersheet::synth::SceneSpec {
    let cams = vergence_pair(FOCAL, WIDTH, HEIGHT, (40.0, 0.0), VERGENCE_DEG.to_radians()).unwrap();
    let mut spec = scene_spec(cams, WIDTH, HEIGHT, 18, 20.0, seed);
    spec.min_separation_px = 14.0;
    spec
}

#[test]
fn detection_finds_every_visible_particle() {
    for seed in 0..5 {
        let (truth, images) = generate_scene(&spec(seed)).unwrap();
        for (cam, img) in images.iter().enumerate() {
            let feats = detect_features(img, 0.01, 3, 2000);
            assert_eq!(feats.len(), truth.visible(cam).len(), "seed {seed} camera {cam}");
        }
    }
}

#[test]
fn images_to_points_closes_on_truth() {
    for seed in 0..3 {
        let s = spec(seed);
        let (truth, images) = generate_scene(&s).unwrap();
        let f0 = detect_features(&images[0], 0.01, 3, 2000);
        let f1 = detect_features(&images[1], 0.01, 3, 2000);
        let est = estimate_offset(&images[0], &images[1], &OffsetOptions::default()).unwrap();
        let pairs = pair_correspondences(&f0, &f1, est.offset, 7.0).unwrap();
        assert_eq!(pairs.len(), 18, "seed {seed}");
        let obs: Vec<Vec<(f64, f64)>> = pairs.pairs.iter().map(|p| vec![p.p1, p.p2]).collect();
        let sheet = SheetModel::canonical(20.0);
        let init = initial_guess_from_cameras(truth.cameras.clone(), &obs, Some(&sheet)).unwrap();
        let res = BundleProblem::new(
            obs,
            SurfaceConstraint::Sheet {
                lower: -10.0,
                upper: 10.0,
            },
            &init,
            BundleOptions::default(),
        )
        .unwrap()
        .solve(&SolverOptions::default())
        .unwrap();
        assert!(res.rms_px < 1e-3, "seed {seed}: rms {}", res.rms_px);
        assert!(monotone(&res.report));
    }
}
