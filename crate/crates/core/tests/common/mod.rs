#![allow(dead_code)]

use lasersheet::geometry::{CameraParams, WorldPoint};
use lasersheet::optimize::{InitialGuess, SolverReport};
use lasersheet::synth::{generate_scene, scene_spec, vergence_pair, GroundTruth, SceneRng};

pub const WIDTH: usize = 200;
pub const HEIGHT: usize = 150;
pub const FOCAL: f64 = 1000.0;
pub const VERGENCE_DEG: f64 = 11.0;

/// Two cameras at 11 degrees vergence over a slab of thickness `depth`,
/// with particles drawn by the synth module.
pub fn slab_scene(n: usize, depth: f64, seed: u64) -> GroundTruth {
    let cams = vergence_pair(FOCAL, WIDTH, HEIGHT, (40.0, 0.0), VERGENCE_DEG.to_radians()).unwrap();
    let (truth, _) = generate_scene(&scene_spec(cams, WIDTH, HEIGHT, n, depth, seed)).unwrap();
    truth
}

/// Second camera's angles moved by up to 2 degrees, points moved by up to 5
/// units in `x` and `y` and dropped onto `z = 0`.
pub fn perturbed_guess(cameras: &[CameraParams], points: &[WorldPoint], seed: u64) -> InitialGuess {
    let mut rng = SceneRng::new(seed ^ 0x5eed);
    let mut cams = cameras.to_vec();
    for e in cams[1].pose.euler.iter_mut() {
        *e += rng.uniform_in(-2.0, 2.0).to_radians();
    }
    let points = points
        .iter()
        .map(|p| {
            WorldPoint::new(
                p.x + rng.uniform_in(-5.0, 5.0),
                p.y + rng.uniform_in(-5.0, 5.0),
                0.0,
            )
        })
        .collect();
    InitialGuess {
        cameras: cams,
        points,
        scales: None,
    }
}

pub fn monotone(report: &SolverReport) -> bool {
    report.cost_trace.windows(2).all(|w| w[1] <= w[0])
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}
