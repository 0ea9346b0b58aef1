use std::path::Path;

use nalgebra::Point3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::SceneRng;
use crate::error::{Error, Result};
use crate::geometry::{project, CameraParams, CameraRecord, WorldPoint};
use crate::imgcore::Image;
use crate::optimize::SheetModel;

/// Blobs are rendered out to this many standard deviations.
const RENDER_EXTENT: f64 = 6.0;
/// Sampling attempts per requested particle before giving up on a view.
const MAX_ATTEMPTS_PER_PARTICLE: usize = 10_000;

/// Where particle `x, y` are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SamplingRegion {
    /// Uniform over the part of the sheet every camera sees, keeping blobs
    /// clear of the image borders.
    CommonView,
    /// Uniform over a rectangle; particles may fall outside some views.
    Rect {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub n_particles: usize,
    pub sheet: SheetModel,
    pub cameras: Vec<CameraParams>,
    /// Gaussian blob radius in pixels.
    pub sigma_px: f64,
    pub width: usize,
    pub height: usize,
    pub background: f64,
    /// Standard deviation of the additive pixel noise.
    pub noise: f64,
    pub seed: u64,
    pub region: SamplingRegion,
    /// Reject particles whose image in any camera lies closer than this to
    /// an earlier particle's; 0 keeps the sampling uniform.
    #[serde(default)]
    pub min_separation_px: f64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::Config("a scene needs at least one particle".into()));
        }
        if self.cameras.is_empty() {
            return Err(Error::Config("a scene needs at least one camera".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(self.sigma_px > 0.0) {
            return Err(Error::Config(format!(
                "blob radius must be positive, got {}",
                self.sigma_px
            )));
        }
        if !(0.0..1.0).contains(&self.background) {
            return Err(Error::Config(format!(
                "background must lie in [0, 1), got {}",
                self.background
            )));
        }
        if !(self.min_separation_px >= 0.0) {
            return Err(Error::Config("minimum separation must be non-negative".into()));
        }
        if !(self.noise >= 0.0) {
            return Err(Error::Config(format!(
                "noise must be non-negative, got {}",
                self.noise
            )));
        }
        if let SamplingRegion::Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        } = self.region
        {
            if !(x_min <= x_max && y_min <= y_max) {
                return Err(Error::Config("sampling rectangle has negative extent".into()));
            }
        }
        self.sheet.validate()?;
        for cam in &self.cameras {
            cam.intrinsics.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub points: Vec<WorldPoint>,
    /// Brightness of each particle.
    pub amplitudes: Vec<f64>,
    /// `[camera][particle]` projected positions, `None` outside the frame.
    pub features: Vec<Vec<Option<(f64, f64)>>>,
    /// Offset between the first two views when they are exact translates.
    pub offset: Option<(i64, i64)>,
    pub cameras: Vec<CameraParams>,
}

impl GroundTruth {
    /// Features of `camera` that are inside its frame, in particle order.
    pub fn visible(&self, camera: usize) -> Vec<(usize, (f64, f64))> {
        self.features[camera]
            .iter()
            .enumerate()
            .filter_map(|(j, f)| f.map(|p| (j, p)))
            .collect()
    }

    /// `[particle][camera]` observations of the particles every camera sees.
    pub fn common_observations(&self) -> (Vec<usize>, Vec<Vec<(f64, f64)>>) {
        let mut ids = Vec::new();
        let mut obs = Vec::new();
        for j in 0..self.points.len() {
            let row: Option<Vec<(f64, f64)>> = self.features.iter().map(|f| f[j]).collect();
            if let Some(row) = row {
                ids.push(j);
                obs.push(row);
            }
        }
        (ids, obs)
    }

    pub fn to_json(&self) -> String {
        let doc = TruthDocument {
            points: self.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
            amplitudes: self.amplitudes.clone(),
            features: self
                .features
                .iter()
                .map(|cam| cam.iter().map(|f| f.map(|(u, v)| [u, v])).collect())
                .collect(),
            offset: self.offset.map(|(du, dv)| [du, dv]),
            cameras: self.cameras.iter().map(CameraRecord::from).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("truth serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TruthDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(GroundTruth {
            points: doc.points.iter().map(|p| Point3::new(p[0], p[1], p[2])).collect(),
            amplitudes: doc.amplitudes,
            features: doc
                .features
                .iter()
                .map(|cam| cam.iter().map(|f| f.map(|p| (p[0], p[1]))).collect())
                .collect(),
            offset: doc.offset.map(|o| (o[0], o[1])),
            cameras: doc.cameras.iter().map(CameraParams::from).collect(),
        })
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct TruthDocument {
    points: Vec<[f64; 3]>,
    amplitudes: Vec<f64>,
    features: Vec<Vec<Option<[f64; 2]>>>,
    offset: Option<[i64; 2]>,
    cameras: Vec<CameraRecord>,
}

fn inside(p: (f64, f64), width: usize, height: usize, margin: f64) -> bool {
    p.0 >= margin
        && p.1 >= margin
        && p.0 <= width as f64 - 1.0 - margin
        && p.1 <= height as f64 - 1.0 - margin
}

/// Bounding rectangle on `z = mid` of the first camera's frame.
fn footprint(cam: &CameraParams, width: usize, height: usize, mid: f64) -> Result<(f64, f64, f64, f64)> {
    let (w, h) = (width as f64 - 1.0, height as f64 - 1.0);
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (u, v) in [(0.0, 0.0), (w, 0.0), (0.0, h), (w, h)] {
        let p = cam.back_project_to_plane(u, v, &nalgebra::Vector3::z(), mid)?;
        b = (b.0.min(p.x), b.1.max(p.x), b.2.min(p.y), b.3.max(p.y));
    }
    Ok(b)
}

/// Offset `(du, dv)` with `right(u, v) = left(u + du, v + dv)` when the two
/// cameras differ only by an integer principal-point shift.
fn translate_offset(a: &CameraParams, b: &CameraParams) -> Option<(i64, i64)> {
    let (ka, kb) = (&a.intrinsics, &b.intrinsics);
    let du = ka.cx - kb.cx;
    let dv = ka.cy - kb.cy;
    let same = ka.fx == kb.fx && ka.fy == kb.fy && a.pose == b.pose && a.distortion == b.distortion;
    (same && du.fract() == 0.0 && dv.fract() == 0.0).then_some((du as i64, dv as i64))
}

/// Samples particles, renders one image per camera, and returns the truth.
///
/// Random draws, in order: for every particle `x, y, z` and its amplitude
/// (repeating `x, y, z` on rejection), then the pixel noise of each image in
/// row-major order.
pub fn generate_scene(spec: &SceneSpec) -> Result<(GroundTruth, Vec<Image>)> {
    spec.validate()?;
    let mut rng = SceneRng::new(spec.seed);
    let (lower, upper) = (spec.sheet.lower, spec.sheet.upper);
    let mid = 0.5 * (lower + upper);
    let margin = 3.0 * spec.sigma_px;

    let (rect, rejection) = match spec.region {
        SamplingRegion::CommonView => {
            let (x0, x1, y0, y1) = footprint(&spec.cameras[0], spec.width, spec.height, mid)?;
            ((x0, x1, y0, y1), true)
        }
        SamplingRegion::Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        } => ((x_min, x_max, y_min, y_max), false),
    };

    let mut points = Vec::with_capacity(spec.n_particles);
    let mut amplitudes = Vec::with_capacity(spec.n_particles);
    let mut images_of: Vec<Vec<Option<(f64, f64)>>> = Vec::new();
    let mut attempts = 0;
    while points.len() < spec.n_particles {
        let p = Point3::new(
            rng.uniform_in(rect.0, rect.1),
            rng.uniform_in(rect.2, rect.3),
            if lower == upper {
                lower
            } else {
                rng.uniform_in(lower, upper)
            },
        );
        if rejection {
            let seen = spec
                .cameras
                .iter()
                .all(|c| project(c, &p).map_or(false, |q| inside(q, spec.width, spec.height, margin)));
            if !seen {
                attempts += 1;
                if attempts > MAX_ATTEMPTS_PER_PARTICLE * spec.n_particles {
                    let cam = (0..spec.cameras.len()).find(|&i| {
                        project(&spec.cameras[i], &p)
                            .map_or(true, |q| !inside(q, spec.width, spec.height, margin))
                    });
                    return Err(Error::EmptyView(cam.unwrap_or(0)));
                }
                continue;
            }
        }
        if spec.min_separation_px > 0.0 {
            let here: Vec<Option<(f64, f64)>> = spec.cameras.iter().map(|c| project(c, &p).ok()).collect();
            let crowded = images_of.iter().any(|other| {
                here.iter().zip(other).any(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => (a.0 - b.0).hypot(a.1 - b.1) < spec.min_separation_px,
                    _ => false,
                })
            });
            if crowded {
                attempts += 1;
                if attempts > MAX_ATTEMPTS_PER_PARTICLE * spec.n_particles {
                    return Err(Error::Config(format!(
                        "cannot place {} particles {} px apart",
                        spec.n_particles, spec.min_separation_px
                    )));
                }
                continue;
            }
            images_of.push(here);
        }
        points.push(p);
        amplitudes.push(rng.uniform_in(0.5, 1.0));
    }

    let features: Vec<Vec<Option<(f64, f64)>>> = spec
        .cameras
        .iter()
        .map(|cam| {
            points
                .iter()
                .map(|p| {
                    project(cam, p)
                        .ok()
                        .filter(|&q| inside(q, spec.width, spec.height, 0.0))
                })
                .collect()
        })
        .collect();
    if let Some(i) = features.iter().position(|f| f.iter().all(Option::is_none)) {
        return Err(Error::EmptyView(i));
    }

    let mut images = Vec::with_capacity(spec.cameras.len());
    for feats in &features {
        let blobs: Vec<((f64, f64), f64)> = feats
            .iter()
            .zip(&amplitudes)
            .filter_map(|(f, &a)| f.map(|p| (p, a)))
            .collect();
        let mut data = render(&blobs, spec);
        if spec.noise > 0.0 {
            for px in data.iter_mut() {
                *px += spec.noise * rng.gaussian();
            }
        }
        for px in data.iter_mut() {
            *px = px.clamp(0.0, 1.0);
        }
        images.push(Image::new(spec.width, spec.height, data)?);
    }

    let offset = match spec.cameras.as_slice() {
        [a, b, ..] => translate_offset(a, b),
        _ => None,
    };
    let truth = GroundTruth {
        points,
        amplitudes,
        features,
        offset,
        cameras: spec.cameras.clone(),
    };
    Ok((truth, images))
}

fn render(blobs: &[((f64, f64), f64)], spec: &SceneSpec) -> Vec<f64> {
    let reach = RENDER_EXTENT * spec.sigma_px;
    let inv = 1.0 / (2.0 * spec.sigma_px * spec.sigma_px);
    let mut data = vec![0.0; spec.width * spec.height];
    data.par_chunks_mut(spec.width).enumerate().for_each(|(v, row)| {
        let vf = v as f64;
        for px in row.iter_mut() {
            *px = spec.background;
        }
        for &((pu, pv), amp) in blobs {
            if (vf - pv).abs() > reach {
                continue;
            }
            let u0 = (pu - reach).ceil().max(0.0) as usize;
            let u1 = ((pu + reach).floor() as i64).min(spec.width as i64 - 1);
            if u1 < u0 as i64 {
                continue;
            }
            let dv2 = (vf - pv) * (vf - pv);
            for (u, px) in row.iter_mut().enumerate().take(u1 as usize + 1).skip(u0) {
                let du = u as f64 - pu;
                *px += amp * (-(du * du + dv2) * inv).exp();
            }
        }
    });
    data
}
