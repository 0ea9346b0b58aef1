//! Projects a point through a pinhole camera, adds distortion, and casts the
//! pixel back onto a plane.
//!
//! `cargo run --example camera_projection`

use lasersheet::geometry::{project, CameraIntrinsics, CameraParams, CameraPose, Distortion, WorldPoint};
use nalgebra::Vector3;

fn main() -> lasersheet::Result<()> {
    let pose = CameraPose::looking_at(WorldPoint::origin(), 11f64.to_radians(), 1000.0);
    let mut cam = CameraParams::new(CameraIntrinsics::square(1000.0, 99.5, 74.5), pose);
    let p = WorldPoint::new(12.0, -7.0, 3.0);
    println!("pinhole:   {:?}", project(&cam, &p)?);

    cam.distortion = Distortion::from_array([0.1, -0.02, 0.0, 0.0, 0.0, 0.0, 0.001, -0.001]);
    let (u, v) = project(&cam, &p)?;
    println!("distorted: ({u:.6}, {v:.6})");

    let back = cam.back_project_to_plane(u, v, &Vector3::z(), 3.0)?;
    println!("back on z = 3: ({:.9}, {:.9}, {:.9})", back.x, back.y, back.z);
    Ok(())
}
