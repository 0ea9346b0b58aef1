use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::distortion::{apply_distortion, distortion_jacobian, Distortion};
use super::rotation::rotation_from_euler;
use crate::error::{Error, Result};

/// A point in world coordinates.
pub type WorldPoint = Point3<f64>;

/// Smallest camera-frame depth accepted by [`project`].
pub const MIN_DEPTH: f64 = 1e-9;

/// Focal lengths and principal point in pixels. Skew is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn square(f: f64, cx: f64, cy: f64) -> Self {
        CameraIntrinsics { fx: f, fy: f, cx, cy }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.fx, self.fy, self.cx, self.cy].iter().all(|x| x.is_finite());
        if !finite || self.fx <= 0.0 || self.fy <= 0.0 {
            return Err(Error::Config(format!(
                "focal lengths must be positive and finite (fx={}, fy={})",
                self.fx, self.fy
            )));
        }
        Ok(())
    }
}

/// Extrinsics: Euler angles `[alpha, beta, gamma]` in radians and the
/// translation of `x_cam = R x + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub euler: [f64; 3],
    pub t: Vector3<f64>,
}

impl Default for CameraPose {
    fn default() -> Self {
        CameraPose {
            euler: [0.0; 3],
            t: Vector3::zeros(),
        }
    }
}

impl CameraPose {
    pub fn rotation(&self) -> Matrix3<f64> {
        let [a, b, g] = self.euler;
        rotation_from_euler(a, b, g)
    }

    /// Camera center in world coordinates.
    pub fn center(&self) -> WorldPoint {
        Point3::from(-(self.rotation().transpose() * self.t))
    }

    /// Optical axis direction in world coordinates.
    pub fn axis(&self) -> Vector3<f64> {
        self.rotation().transpose() * Vector3::z()
    }

    /// Pose whose optical axis passes through `target` from `distance` away,
    /// with the axis tilted from world `+z` by `vergence` about the world
    /// `y` axis (camera angles `[0, vergence, 0]`).
    pub fn looking_at(target: WorldPoint, vergence: f64, distance: f64) -> Self {
        let euler = [0.0, vergence, 0.0];
        let r = rotation_from_euler(0.0, vergence, 0.0);
        let axis = r.transpose() * Vector3::z();
        let center = target - axis * distance;
        CameraPose {
            euler,
            t: -(r * center.coords),
        }
    }
}

/// Intrinsics, pose and distortion of one camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraParams {
    pub intrinsics: CameraIntrinsics,
    pub pose: CameraPose,
    pub distortion: Distortion,
}

impl CameraParams {
    pub fn new(intrinsics: CameraIntrinsics, pose: CameraPose) -> Self {
        CameraParams {
            intrinsics,
            pose,
            distortion: Distortion::default(),
        }
    }

    pub fn to_camera_frame(&self, x: &WorldPoint) -> Vector3<f64> {
        self.pose.rotation() * x.coords + self.pose.t
    }

    /// 3x4 projection matrix `C [R | t]`.
    pub fn projection_matrix(&self) -> nalgebra::Matrix3x4<f64> {
        let mut rt = nalgebra::Matrix3x4::zeros();
        rt.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.pose.rotation());
        rt.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.pose.t);
        self.intrinsics.matrix() * rt
    }

    /// Removes lens distortion from a pixel, returning normalized
    /// coordinates. Solved by Newton iteration on [`apply_distortion`].
    pub fn undistort(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        let k = &self.intrinsics;
        let target = ((u - k.cx) / k.fx, (v - k.cy) / k.fy);
        if self.distortion.is_zero() {
            return Ok(target);
        }
        let mut p = target;
        for _ in 0..50 {
            let d = apply_distortion(p, &self.distortion)?;
            let (j, _) = distortion_jacobian(p, &self.distortion)?;
            let r = nalgebra::Vector2::new(d.0 - target.0, d.1 - target.1);
            if r.amax() < 1e-15 {
                break;
            }
            let step = j
                .try_inverse()
                .ok_or(Error::SingularDistortion(j.determinant()))?
                * r;
            p = (p.0 - step.x, p.1 - step.y);
        }
        Ok(p)
    }

    /// World-space ray `(origin, direction)` through a pixel.
    pub fn pixel_ray(&self, u: f64, v: f64) -> Result<(WorldPoint, Vector3<f64>)> {
        let (x, y) = self.undistort(u, v)?;
        let dir = self.pose.rotation().transpose() * Vector3::new(x, y, 1.0);
        Ok((self.pose.center(), dir))
    }

    /// Intersects the ray through a pixel with the plane `normal . x = offset`.
    pub fn back_project_to_plane(
        &self,
        u: f64,
        v: f64,
        normal: &Vector3<f64>,
        offset: f64,
    ) -> Result<WorldPoint> {
        let (o, d) = self.pixel_ray(u, v)?;
        let denom = normal.dot(&d);
        if denom.abs() < 1e-15 {
            return Err(Error::Config("pixel ray is parallel to the plane".into()));
        }
        let s = (offset - normal.dot(&o.coords)) / denom;
        if s <= 0.0 {
            return Err(Error::BehindCamera(s));
        }
        Ok(o + d * s)
    }
}

/// Projects a world point to pixel coordinates with perspective division.
pub fn project(cam: &CameraParams, x: &WorldPoint) -> Result<(f64, f64)> {
    let xc = cam.to_camera_frame(x);
    if !(xc.z > MIN_DEPTH) {
        return Err(Error::BehindCamera(xc.z));
    }
    let (xd, yd) = apply_distortion((xc.x / xc.z, xc.y / xc.z), &cam.distortion)?;
    let k = &cam.intrinsics;
    Ok((k.fx * xd + k.cx, k.fy * yd + k.cy))
}
