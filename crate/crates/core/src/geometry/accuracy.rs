//! Depth resolution of two cameras whose pixel footprints intersect at a
//! small angle.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MICROMETRES_PER_MILLIMETRE: f64 = 1000.0;

/// Diagonals of the parallelogram in which two one-pixel-wide viewing strips
/// of height `h` intersect at angle `alpha`. Returns `(dz, dx)` with
/// `dz >= dx`: `dz` is the extent along the viewing direction, `dx` across.
pub fn parallelogram_diagonals(alpha: f64, h: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::Domain(alpha));
    }
    if !(h > 0.0) {
        return Err(Error::Config(format!("feature height must be positive, got {h}")));
    }
    let beta = PI - alpha;
    let a = h / beta.sin();
    let b = h / alpha.sin();
    let base = a * a + b * b;
    let cross = 2.0 * a * b * alpha.cos();
    let plus = (base + cross).max(0.0).sqrt();
    let minus = (base - cross).max(0.0).sqrt();
    Ok((plus.max(minus), plus.min(minus)))
}

/// Object-space size of one pixel.
pub fn pixel_pitch(fov_width: f64, sensor_width_px: f64) -> f64 {
    fov_width / sensor_width_px
}
