//! Recovers two cameras and ten in-plane particles from a rough start.
//!
//! `cargo run --example plane_calibration`

use lasersheet::optimize::{
    gauge_align, BundleOptions, BundleProblem, InitialGuess, SolverOptions, SurfaceConstraint,
};
use lasersheet::synth::{generate_scene, scene_spec, vergence_pair};

fn main() -> lasersheet::Result<()> {
    let cams = vergence_pair(1000.0, 200, 150, (40.0, 0.0), 11f64.to_radians())?;
    let (truth, _) = generate_scene(&scene_spec(cams, 200, 150, 10, 0.0, 21))?;
    let (_, obs) = truth.common_observations();

    let mut start = truth.cameras.clone();
    start[1].pose.euler[1] += 1.5f64.to_radians();
    start[1].pose.euler[2] -= 1.0f64.to_radians();
    let points = truth
        .points
        .iter()
        .map(|p| p + nalgebra::Vector3::new(3.0, -4.0, 0.0))
        .collect();
    let init = InitialGuess {
        cameras: start,
        points,
        scales: None,
    };

    let problem = BundleProblem::new(obs, SurfaceConstraint::Plane, &init, BundleOptions::default())?;
    let res = problem.solve(&SolverOptions::default())?;
    let (_, point_rms) = gauge_align(&res.points, &truth.points)?;
    println!(
        "{:?} after {} iterations: reprojection rms {:.2e} px, aligned point rms {:.2e}",
        res.report.termination, res.report.iterations, res.rms_px, point_rms
    );
    Ok(())
}
