use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{ClipRegion, SearchWindow, Similarity};
use crate::optimize::{BundleOptions, SolverOptions};

/// Everything a pipeline run depends on. Read from TOML; every field has a
/// command-line twin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub input: InputConfig,
    pub detect: DetectConfig,
    #[serde(rename = "match")]
    pub matching: MatchConfig,
    pub pair: PairConfig,
    pub calibrate: CalibrateConfig,
    pub solver: SolverOptions,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            output_dir: PathBuf::from("out"),
            input: InputConfig::default(),
            detect: DetectConfig::default(),
            matching: MatchConfig::default(),
            pair: PairConfig::default(),
            calibrate: CalibrateConfig::default(),
            solver: SolverOptions::default(),
            synth: SynthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// One image per camera; the first is the left (reference) view.
    pub images: Vec<PathBuf>,
    /// Feature CSVs, one per camera, used instead of detecting.
    pub features: Vec<PathBuf>,
    /// Correspondence CSV used instead of detecting and pairing.
    pub pairs: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectConfig {
    pub threshold: f64,
    pub min_pixels: usize,
    pub max_pixels: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            threshold: 0.1,
            min_pixels: 3,
            max_pixels: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    pub stride: usize,
    pub window: Option<SearchWindow>,
    pub clip: Option<ClipRegion>,
    pub similarity: Similarity,
    pub min_score: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            stride: 1,
            window: None,
            clip: None,
            similarity: Similarity::Cosine,
            min_score: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairConfig {
    pub tolerance_px: f64,
    /// Mosaic offset; estimated by template matching when absent.
    pub offset: Option<(i64, i64)>,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig {
            tolerance_px: 6.0,
            offset: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateConfig {
    /// Sheet thickness in world units; absent means the plane problem.
    pub sheet_depth: Option<f64>,
    pub vergence_deg: f64,
    pub focal_px: f64,
    /// `[width, height]`, needed when no images are given.
    pub image_size: Option<(usize, usize)>,
    /// Camera files used as the starting cameras instead of the prior.
    pub cameras: Vec<PathBuf>,
    pub square_pixels: bool,
    pub fit_distortion: bool,
    pub eliminate_scales: bool,
    pub scale_row_weight: f64,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        let b = BundleOptions::default();
        CalibrateConfig {
            sheet_depth: None,
            vergence_deg: 11.0,
            focal_px: 1000.0,
            image_size: None,
            cameras: Vec::new(),
            square_pixels: b.square_pixels,
            fit_distortion: b.fit_distortion,
            eliminate_scales: b.eliminate_scales,
            scale_row_weight: b.scale_row_weight,
        }
    }
}

impl CalibrateConfig {
    pub fn bundle_options(&self) -> BundleOptions {
        BundleOptions {
            square_pixels: self.square_pixels,
            fit_distortion: self.fit_distortion,
            eliminate_scales: self.eliminate_scales,
            scale_row_weight: self.scale_row_weight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RigKind {
    /// Identical cameras whose frames differ by an integer pixel shift.
    Translate,
    /// Second camera tilted by the vergence angle.
    Vergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub rig: RigKind,
    pub particles: usize,
    pub depth: f64,
    pub vergence_deg: f64,
    pub offset: (i64, i64),
    pub focal_px: f64,
    pub width: usize,
    pub height: usize,
    pub sigma_px: f64,
    pub background: f64,
    pub noise: f64,
    pub seed: u64,
    pub min_separation_px: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            rig: RigKind::Vergence,
            particles: 18,
            depth: 20.0,
            vergence_deg: 11.0,
            offset: (40, 0),
            focal_px: 1000.0,
            width: 200,
            height: 150,
            sigma_px: 1.5,
            background: 0.0,
            noise: 0.0,
            seed: 1,
            min_separation_px: 0.0,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let d = &self.detect;
        if !(0.0..1.0).contains(&d.threshold) {
            return bad(format!(
                "detect.threshold must lie in [0, 1), got {}",
                d.threshold
            ));
        }
        if d.min_pixels == 0 || d.min_pixels > d.max_pixels {
            return bad("detect.min_pixels must be positive and at most detect.max_pixels".into());
        }
        if self.matching.stride == 0 {
            return bad("match.stride must be positive".into());
        }
        if !(self.pair.tolerance_px > 0.0) {
            return bad(format!(
                "pair.tolerance_px must be positive, got {}",
                self.pair.tolerance_px
            ));
        }
        let c = &self.calibrate;
        if let Some(depth) = c.sheet_depth {
            if !(depth > 0.0 && depth.is_finite()) {
                return bad(format!("calibrate.sheet_depth must be positive, got {depth}"));
            }
        }
        if !(c.focal_px > 0.0) {
            return bad(format!("calibrate.focal_px must be positive, got {}", c.focal_px));
        }
        if !(c.vergence_deg > 0.0 && c.vergence_deg < 180.0) {
            return bad(format!(
                "calibrate.vergence_deg must lie in (0, 180), got {}",
                c.vergence_deg
            ));
        }
        if !(c.scale_row_weight > 0.0) {
            return bad("calibrate.scale_row_weight must be positive".into());
        }
        self.solver.validate()?;
        let s = &self.synth;
        if s.particles == 0 || s.width == 0 || s.height == 0 {
            return bad("synth.particles, synth.width and synth.height must be positive".into());
        }
        if !(s.depth >= 0.0) {
            return bad(format!("synth.depth must be non-negative, got {}", s.depth));
        }
        Ok(())
    }
}
