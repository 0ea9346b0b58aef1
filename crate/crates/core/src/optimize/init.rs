//! Starting values for the two-camera problems.

use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::bundle::InitialGuess;
use super::bundle::SheetModel;
use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, CameraParams, CameraPose, WorldPoint};
use crate::matching::CorrespondenceSet;

/// Prior knowledge used to place the cameras before optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPrior {
    /// Focal length in pixels, shared by both cameras.
    pub focal_px: f64,
    /// Principal points of the left and right cameras.
    pub principal: [(f64, f64); 2],
    /// Angle between the viewing directions, radians.
    pub vergence: f64,
}

impl CameraPrior {
    /// Principal points at the centers of `width x height` frames.
    pub fn centered(focal_px: f64, width: usize, height: usize, vergence: f64) -> Self {
        let c = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
        CameraPrior {
            focal_px,
            principal: [c, c],
            vergence,
        }
    }
}

/// Camera on the `-z` axis looking down `+z` at the plane `z = 0` from a
/// distance equal to its focal length, so one world unit spans one pixel
/// on that plane.
pub fn canonical_camera(focal_px: f64, cx: f64, cy: f64) -> CameraParams {
    CameraParams::new(
        CameraIntrinsics::square(focal_px, cx, cy),
        CameraPose {
            euler: [0.0; 3],
            t: Vector3::new(0.0, 0.0, focal_px),
        },
    )
}

/// Second camera of a rig registered by the mosaic offset `(du, dv)`: its
/// principal ray meets `z = 0` where the first camera sees left pixel
/// `principal + offset`, and it is tilted by the vergence angle.
pub fn offset_camera(
    left: &CameraParams,
    focal_px: f64,
    principal: (f64, f64),
    offset: (f64, f64),
    vergence: f64,
) -> Result<CameraParams> {
    let target =
        left.back_project_to_plane(principal.0 + offset.0, principal.1 + offset.1, &Vector3::z(), 0.0)?;
    Ok(CameraParams::new(
        CameraIntrinsics::square(focal_px, principal.0, principal.1),
        CameraPose::looking_at(target, vergence, focal_px),
    ))
}

/// Cameras from the prior and the pairing offset; particles back-projected
/// from their left-image features onto `z = 0`.
pub fn initial_guess_from_pairs(pairs: &CorrespondenceSet, prior: &CameraPrior) -> Result<InitialGuess> {
    let [(cx1, cy1), p2] = prior.principal;
    let left = canonical_camera(prior.focal_px, cx1, cy1);
    let right = offset_camera(
        &left,
        prior.focal_px,
        p2,
        (pairs.offset.0 as f64, pairs.offset.1 as f64),
        prior.vergence,
    )?;
    let points = pairs
        .pairs
        .iter()
        .map(|p| left.back_project_to_plane(p.p1.0, p.p1.1, &Vector3::z(), 0.0))
        .collect::<Result<Vec<Point3<f64>>>>()?;
    Ok(InitialGuess {
        cameras: vec![left, right],
        points,
        scales: None,
    })
}

/// Point closest, in the least-squares sense, to the viewing rays of one
/// particle's observations.
pub fn triangulate(cameras: &[CameraParams], observations: &[(f64, f64)]) -> Result<WorldPoint> {
    if cameras.len() != observations.len() || cameras.len() < 2 {
        return Err(Error::LengthMismatch(format!(
            "triangulation needs one observation per camera and at least two cameras, got {} and {}",
            observations.len(),
            cameras.len()
        )));
    }
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for (cam, &(u, v)) in cameras.iter().zip(observations) {
        let (c, d) = cam.pixel_ray(u, v)?;
        let d = d.normalize();
        let proj = Matrix3::identity() - d * d.transpose();
        a += proj;
        b += proj * c.coords;
    }
    let eig = a.symmetric_eigenvalues();
    if eig.min() <= 1e-12 * eig.max() {
        return Err(Error::RankDeficient);
    }
    let x = a.cholesky().ok_or(Error::RankDeficient)?.solve(&b);
    Ok(Point3::from(x))
}

/// Starting points for known cameras: triangulated rays with the depth
/// clamped into the sheet, or back-projected onto `z = 0` for the plane.
pub fn initial_guess_from_cameras(
    cameras: Vec<CameraParams>,
    observations: &[Vec<(f64, f64)>],
    sheet: Option<&SheetModel>,
) -> Result<InitialGuess> {
    let points = observations
        .iter()
        .map(|obs| match sheet {
            Some(s) => triangulate(&cameras, obs).map(|p| Point3::new(p.x, p.y, p.z.clamp(s.lower, s.upper))),
            None => cameras[0].back_project_to_plane(obs[0].0, obs[0].1, &Vector3::z(), 0.0),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InitialGuess {
        cameras,
        points,
        scales: None,
    })
}
