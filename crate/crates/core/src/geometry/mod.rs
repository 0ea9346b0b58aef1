//! Pinhole cameras with rational lens distortion.
//!
//! A world point `x` maps to camera coordinates `R x + t`, is divided by its
//! depth, distorted in normalized coordinates and finally scaled by the
//! camera matrix (zero skew). Rotations are composed from Euler angles as
//! `R = Rz(gamma) * Ry(beta) * Rx(alpha)`.

mod accuracy;
mod camera;
mod camfile;
mod distortion;
mod rotation;

pub use accuracy::{parallelogram_diagonals, pixel_pitch, MICROMETRES_PER_MILLIMETRE};
pub use camera::{project, CameraIntrinsics, CameraParams, CameraPose, WorldPoint, MIN_DEPTH};
pub use camfile::{format_camera, parse_camera, read_camera_file, write_camera_file, CameraRecord};
pub use distortion::{apply_distortion, distortion_jacobian, Distortion};
pub use rotation::{rotation_derivatives, rotation_from_euler};
