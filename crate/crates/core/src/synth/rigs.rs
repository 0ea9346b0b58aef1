//! Ready-made scene layouts.

use nalgebra::Vector3;

use super::scene::{SamplingRegion, SceneSpec};
use crate::error::Result;
use crate::geometry::CameraParams;
use crate::optimize::{canonical_camera, offset_camera, SheetModel};

/// Two cameras whose images are exact translates: the second frame shows
/// the first shifted so that `right(u, v) = left(u + du, v + dv)`.
pub fn translate_pair(focal_px: f64, width: usize, height: usize, offset: (i64, i64)) -> Vec<CameraParams> {
    let (cx, cy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    let left = canonical_camera(focal_px, cx, cy);
    let mut right = left;
    right.intrinsics.cx = cx - offset.0 as f64;
    right.intrinsics.cy = cy - offset.1 as f64;
    vec![left, right]
}

/// Canonical first camera plus a second one tilted by `vergence` radians,
/// aimed at the point the first sees at `center + offset`.
pub fn vergence_pair(
    focal_px: f64,
    width: usize,
    height: usize,
    offset: (f64, f64),
    vergence: f64,
) -> Result<Vec<CameraParams>> {
    let c = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    let left = canonical_camera(focal_px, c.0, c.1);
    let right = offset_camera(&left, focal_px, c, offset, vergence)?;
    Ok(vec![left, right])
}

/// Scene spec with the defaults used throughout: blob radius 1.5 px, black
/// background, no noise, particles over the common view.
pub fn scene_spec(
    cameras: Vec<CameraParams>,
    width: usize,
    height: usize,
    n_particles: usize,
    depth: f64,
    seed: u64,
) -> SceneSpec {
    SceneSpec {
        n_particles,
        sheet: SheetModel {
            normal: Vector3::z(),
            lower: -depth / 2.0,
            upper: depth / 2.0,
        },
        cameras,
        sigma_px: 1.5,
        width,
        height,
        background: 0.0,
        noise: 0.0,
        seed,
        region: SamplingRegion::CommonView,
        min_separation_px: 0.0,
    }
}
