use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lm::SolverReport;
use crate::error::{Error, Result};
use crate::geometry::{project, CameraParams, CameraRecord, WorldPoint};

/// Output of a bundle solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub cameras: Vec<CameraParams>,
    /// `[camera][particle]`, all positive.
    pub scales: Vec<Vec<f64>>,
    pub points: Vec<WorldPoint>,
    /// Reprojection RMS in pixels, see [`reprojection_rms`].
    pub rms_px: f64,
    pub report: SolverReport,
}

impl ReconstructionResult {
    pub fn reprojection_rms(&self, observations: &[Vec<(f64, f64)>]) -> f64 {
        reprojection_rms(&self.cameras, &self.points, observations)
    }

    pub fn to_json(&self) -> String {
        let doc = ResultDocument {
            cameras: self.cameras.iter().map(CameraRecord::from).collect(),
            points: self.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
            scales: self.scales.clone(),
            rms_px: self.rms_px,
            report: self.report.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("result serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ResultDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(ReconstructionResult {
            cameras: doc.cameras.iter().map(CameraParams::from).collect(),
            scales: doc.scales,
            points: doc
                .points
                .iter()
                .map(|p| WorldPoint::new(p[0], p[1], p[2]))
                .collect(),
            rms_px: doc.rms_px,
            report: doc.report,
        })
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// `id,x,y,z` with nine significant digits.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("id,x,y,z\n");
        for (id, p) in self.points.iter().enumerate() {
            let _ = writeln!(out, "{id},{:.8e},{:.8e},{:.8e}", p.x, p.y, p.z);
        }
        out
    }

    pub fn write_points_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.points_csv()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Serialize, Deserialize)]
struct ResultDocument {
    cameras: Vec<CameraRecord>,
    points: Vec<[f64; 3]>,
    scales: Vec<Vec<f64>>,
    rms_px: f64,
    report: SolverReport,
}

/// Pixel error norm of every observation, `[particle][camera]`, using
/// perspective division. Points behind a camera give infinity.
pub fn observation_errors(
    cameras: &[CameraParams],
    points: &[WorldPoint],
    observations: &[Vec<(f64, f64)>],
) -> Vec<Vec<f64>> {
    points
        .iter()
        .zip(observations)
        .map(|(p, obs)| {
            cameras
                .iter()
                .zip(obs)
                .map(|(cam, o)| match project(cam, p) {
                    Ok((u, v)) => (u - o.0).hypot(v - o.1),
                    Err(_) => f64::INFINITY,
                })
                .collect()
        })
        .collect()
}

/// Root mean square over all observations of the pixel error norm.
pub fn reprojection_rms(
    cameras: &[CameraParams],
    points: &[WorldPoint],
    observations: &[Vec<(f64, f64)>],
) -> f64 {
    let errors = observation_errors(cameras, points, observations);
    let (sum, count) = errors
        .iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), e| (s + e * e, c + 1));
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    }
}

/// RMS pixel error of each particle over its observations.
pub fn particle_rms(
    cameras: &[CameraParams],
    points: &[WorldPoint],
    observations: &[Vec<(f64, f64)>],
) -> Vec<f64> {
    observation_errors(cameras, points, observations)
        .iter()
        .map(|e| (e.iter().map(|x| x * x).sum::<f64>() / e.len().max(1) as f64).sqrt())
        .collect()
}
