use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{PipelineConfig, RigKind};
use crate::error::{Error, Result};
use crate::geometry::{
    parallelogram_diagonals, pixel_pitch, read_camera_file, write_camera_file, MICROMETRES_PER_MILLIMETRE,
};
use crate::imgcore::{
    detect_features, load_image, read_features_csv, write_features_csv, BitDepth, Feature2D, Image,
};
use crate::matching::{
    combine_images, estimate_offset, pair_correspondences, read_correspondences_csv,
    write_correspondences_csv, ClipRegion, CorrespondenceSet, OffsetEstimate, OffsetOptions, SearchWindow,
};
use crate::optimize::{
    build_plane_problem, build_sheet_problem, count_dof, initial_guess_from_cameras,
    initial_guess_from_pairs, CameraPrior, InitialGuess, NllsProblem, ReconstructionResult, SheetModel,
    GAUGE_DIMENSION,
};
use crate::synth::{generate_scene, scene_spec, translate_pair, vergence_pair, GroundTruth, GENERATOR_NAME};

pub const FEATURES_FILE_PREFIX: &str = "features_";
pub const OFFSET_FILE: &str = "offset.json";
pub const MOSAIC_FILE: &str = "mosaic.pgm";
pub const HEATMAP_FILE: &str = "heatmap.pgm";
pub const PAIRS_FILE: &str = "pairs.csv";
pub const RESULT_FILE: &str = "reconstruction.json";
pub const POINTS_FILE: &str = "points.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const TRUTH_FILE: &str = "truth.json";
pub const SCENE_FILE: &str = "scene.json";
pub const PROVENANCE_FILE: &str = "provenance.json";

/// Which surface the particles are assumed to lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMode {
    Plane,
    Sheet,
}

/// Serialized outcome of `match`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetRecord {
    pub offset: (i64, i64),
    pub score: f64,
    pub clip: ClipRegion,
    pub window: Option<SearchWindow>,
    pub warnings: Vec<String>,
}

impl OffsetRecord {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    random_generator: &'static str,
    config: &'a PipelineConfig,
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

/// Creates the output directory and records the resolved configuration.
fn prepare_output(cfg: &PipelineConfig, command: &str) -> Result<PathBuf> {
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let record = Provenance {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        random_generator: GENERATOR_NAME,
        config: cfg,
    };
    write_file(&dir.join(PROVENANCE_FILE), json(&record))?;
    Ok(dir)
}

fn load_images(cfg: &PipelineConfig, needed: usize) -> Result<Vec<Image>> {
    if cfg.input.images.len() < needed {
        return Err(Error::Config(format!(
            "need {needed} input images, got {}",
            cfg.input.images.len()
        )));
    }
    cfg.input.images.iter().map(load_image).collect()
}

fn offset_options(cfg: &PipelineConfig) -> OffsetOptions {
    let m = &cfg.matching;
    OffsetOptions {
        clip: m.clip,
        window: m.window,
        stride: m.stride,
        similarity: m.similarity,
        min_score: m.min_score,
    }
}

fn detect_all(cfg: &PipelineConfig, images: &[Image], dir: &Path) -> Result<Vec<Vec<Feature2D>>> {
    let d = &cfg.detect;
    let mut out = Vec::with_capacity(images.len());
    for (i, img) in images.iter().enumerate() {
        let feats = detect_features(img, d.threshold, d.min_pixels, d.max_pixels);
        write_features_csv(dir.join(format!("{FEATURES_FILE_PREFIX}{i}.csv")), &feats)?;
        out.push(feats);
    }
    Ok(out)
}

fn run_match(cfg: &PipelineConfig, images: &[Image], dir: &Path) -> Result<OffsetEstimate> {
    let est = estimate_offset(&images[0], &images[1], &offset_options(cfg))?;
    for w in &est.warnings {
        log::warn!("{w}");
    }
    let record = OffsetRecord {
        offset: est.offset,
        score: est.score,
        clip: est.clip,
        window: cfg.matching.window,
        warnings: est.warnings.clone(),
    };
    write_file(&dir.join(OFFSET_FILE), json(&record))?;
    combine_images(&images[0], &images[1], est.offset).write_pgm(dir.join(MOSAIC_FILE), BitDepth::Sixteen)?;
    est.score_map.write_heatmap(dir.join(HEATMAP_FILE))?;
    Ok(est)
}

/// Detects features in every input image and writes `features_<i>.csv`.
pub fn cmd_detect(cfg: &PipelineConfig) -> Result<Vec<Vec<Feature2D>>> {
    let images = load_images(cfg, 1)?;
    let dir = prepare_output(cfg, "detect")?;
    detect_all(cfg, &images, &dir)
}

/// Registers the second image onto the first; writes the offset, the
/// mosaic and the score heatmap.
pub fn cmd_match(cfg: &PipelineConfig) -> Result<OffsetEstimate> {
    let images = load_images(cfg, 2)?;
    let dir = prepare_output(cfg, "match")?;
    run_match(cfg, &images, &dir)
}

/// Writes the mosaic of the first two images at the configured offset, or
/// at the matched one when none is configured.
pub fn cmd_combine(cfg: &PipelineConfig) -> Result<Image> {
    let images = load_images(cfg, 2)?;
    let dir = prepare_output(cfg, "combine")?;
    let offset = match cfg.pair.offset {
        Some(o) => o,
        None => run_match(cfg, &images, &dir)?.offset,
    };
    let mosaic = combine_images(&images[0], &images[1], offset);
    mosaic.write_pgm(dir.join(MOSAIC_FILE), BitDepth::Sixteen)?;
    Ok(mosaic)
}

fn pair_in(cfg: &PipelineConfig, dir: &Path) -> Result<CorrespondenceSet> {
    let need_images = cfg.input.features.len() < 2 || cfg.pair.offset.is_none();
    let images = if need_images {
        load_images(cfg, 2)?
    } else {
        Vec::new()
    };
    let features = if cfg.input.features.len() >= 2 {
        cfg.input.features[..2]
            .iter()
            .map(read_features_csv)
            .collect::<Result<Vec<_>>>()?
    } else {
        detect_all(cfg, &images[..2], dir)?
    };
    let offset = match cfg.pair.offset {
        Some(o) => o,
        None => run_match(cfg, &images, dir)?.offset,
    };
    let set = pair_correspondences(&features[0], &features[1], offset, cfg.pair.tolerance_px)?;
    write_correspondences_csv(dir.join(PAIRS_FILE), &set)?;
    Ok(set)
}

/// Pairs the features of the first two cameras; detects and matches first
/// when features or offset are not supplied.
pub fn cmd_pair(cfg: &PipelineConfig) -> Result<CorrespondenceSet> {
    let dir = prepare_output(cfg, "pair")?;
    pair_in(cfg, &dir)
}

/// Rounded median displacement between paired features.
fn offset_from_pairs(pairs: &[(f64, f64, f64, f64)]) -> (i64, i64) {
    let median = |mut v: Vec<f64>| -> f64 {
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let du = median(pairs.iter().map(|p| p.0 - p.2).collect());
    let dv = median(pairs.iter().map(|p| p.1 - p.3).collect());
    (du.round() as i64, dv.round() as i64)
}

fn initial_guess(
    cfg: &PipelineConfig,
    pairs: &CorrespondenceSet,
    sheet: Option<&SheetModel>,
) -> Result<InitialGuess> {
    let c = &cfg.calibrate;
    if !c.cameras.is_empty() {
        if c.cameras.len() != 2 {
            return Err(Error::Config(format!(
                "calibrate.cameras must list 2 camera files, got {}",
                c.cameras.len()
            )));
        }
        let cams = c
            .cameras
            .iter()
            .map(read_camera_file)
            .collect::<Result<Vec<_>>>()?;
        let obs: Vec<Vec<(f64, f64)>> = pairs.pairs.iter().map(|p| vec![p.p1, p.p2]).collect();
        return initial_guess_from_cameras(cams, &obs, sheet);
    }
    let (w, h) = match (c.image_size, cfg.input.images.first()) {
        (Some(size), _) => size,
        (None, Some(path)) => {
            let img = load_image(path)?;
            (img.width(), img.height())
        }
        (None, None) => {
            return Err(Error::Config(
                "calibrate.image_size is required when no images are given".into(),
            ))
        }
    };
    let prior = CameraPrior::centered(c.focal_px, w, h, c.vergence_deg.to_radians());
    initial_guess_from_pairs(pairs, &prior)
}

fn report_text(
    mode: CalibrationMode,
    cfg: &PipelineConfig,
    n_params: usize,
    n_residuals: usize,
    res: &ReconstructionResult,
) -> String {
    let mut out = String::new();
    match mode {
        CalibrationMode::Plane => out.push_str("mode: plane z = 0\n"),
        CalibrationMode::Sheet => {
            let _ = writeln!(
                out,
                "mode: sheet of depth {}",
                cfg.calibrate.sheet_depth.unwrap_or(0.0)
            );
        }
    }
    let _ = writeln!(out, "cameras: {}", res.cameras.len());
    let _ = writeln!(out, "particles: {}", res.points.len());
    let _ = writeln!(
        out,
        "unknowns: {} ({n_params} free, {GAUGE_DIMENSION} fixed by the gauge)",
        n_params + GAUGE_DIMENSION
    );
    let _ = writeln!(out, "equations: {n_residuals}");
    let r = &res.report;
    let _ = writeln!(out, "termination: {:?}", r.termination);
    let _ = writeln!(out, "iterations: {}", r.iterations);
    let _ = writeln!(
        out,
        "initial cost: {:e}",
        r.cost_trace.first().copied().unwrap_or(r.final_cost)
    );
    let _ = writeln!(out, "final cost: {:e}", r.final_cost);
    let _ = writeln!(out, "reprojection rms px: {:e}", res.rms_px);
    for (i, cam) in res.cameras.iter().enumerate() {
        let k = &cam.intrinsics;
        let [a, b, g] = cam.pose.euler;
        let t = cam.pose.t;
        let _ = writeln!(
            out,
            "camera {i}: fx {} fy {} cx {} cy {} angles deg [{}, {}, {}] t [{}, {}, {}]",
            k.fx,
            k.fy,
            k.cx,
            k.cy,
            a.to_degrees(),
            b.to_degrees(),
            g.to_degrees(),
            t.x,
            t.y,
            t.z
        );
    }
    out
}

/// Joint camera and particle estimation from two views; writes the
/// reconstruction JSON, the points CSV and a text report.
pub fn cmd_calibrate(cfg: &PipelineConfig, mode: CalibrationMode) -> Result<ReconstructionResult> {
    let sheet = match mode {
        CalibrationMode::Plane => None,
        CalibrationMode::Sheet => {
            let depth = cfg.calibrate.sheet_depth.ok_or_else(|| {
                Error::Config("the sheet problem needs calibrate.sheet_depth (--sheet-depth)".into())
            })?;
            Some(SheetModel::canonical(depth))
        }
    };
    let command = match mode {
        CalibrationMode::Plane => "calibrate-plane",
        CalibrationMode::Sheet => "calibrate-sheet",
    };
    let dir = prepare_output(cfg, command)?;
    let pairs = match &cfg.input.pairs {
        Some(path) => {
            let probe = read_correspondences_csv(path, (0, 0), cfg.pair.tolerance_px)?;
            let offset = cfg.pair.offset.unwrap_or_else(|| {
                offset_from_pairs(
                    &probe
                        .pairs
                        .iter()
                        .map(|p| (p.p1.0, p.p1.1, p.p2.0, p.p2.1))
                        .collect::<Vec<_>>(),
                )
            });
            read_correspondences_csv(path, offset, cfg.pair.tolerance_px)?
        }
        None => pair_in(cfg, &dir)?,
    };
    let init = initial_guess(cfg, &pairs, sheet.as_ref())?;
    let options = cfg.calibrate.bundle_options();
    let problem = match &sheet {
        None => build_plane_problem(&pairs, &init, options)?,
        Some(s) => {
            let obs = pairs.pairs.iter().map(|p| vec![p.p1, p.p2]).collect();
            build_sheet_problem(obs, s, &init, options)?
        }
    };
    let (n_params, n_residuals) = (problem.num_params(), problem.num_residuals());
    let result = problem.solve(&cfg.solver)?;
    result.write_json(dir.join(RESULT_FILE))?;
    result.write_points_csv(dir.join(POINTS_FILE))?;
    write_file(
        &dir.join(REPORT_FILE),
        report_text(mode, cfg, n_params, n_residuals, &result),
    )?;
    Ok(result)
}

/// Renders a synthetic scene directory: one 16-bit PGM and camera file per
/// camera, the ground truth and the scene description.
pub fn cmd_synth(cfg: &PipelineConfig) -> Result<(GroundTruth, Vec<PathBuf>)> {
    let s = &cfg.synth;
    let cameras = match s.rig {
        RigKind::Translate => translate_pair(s.focal_px, s.width, s.height, s.offset),
        RigKind::Vergence => vergence_pair(
            s.focal_px,
            s.width,
            s.height,
            (s.offset.0 as f64, s.offset.1 as f64),
            s.vergence_deg.to_radians(),
        )?,
    };
    let mut spec = scene_spec(cameras, s.width, s.height, s.particles, s.depth, s.seed);
    spec.sigma_px = s.sigma_px;
    spec.background = s.background;
    spec.noise = s.noise;
    spec.min_separation_px = s.min_separation_px;
    let (truth, images) = generate_scene(&spec)?;

    let dir = prepare_output(cfg, "synth")?;
    let mut paths = Vec::new();
    for (i, (img, cam)) in images.iter().zip(&spec.cameras).enumerate() {
        let path = dir.join(format!("camera_{i}.pgm"));
        img.write_pgm(&path, BitDepth::Sixteen)?;
        write_camera_file(dir.join(format!("camera_{i}.cam")), cam)?;
        paths.push(path);
    }
    write_file(&dir.join(TRUTH_FILE), truth.to_json())?;
    write_file(&dir.join(SCENE_FILE), json(&spec))?;
    Ok((truth, paths))
}

/// Depth and lateral resolution table, followed by the pixel pitch. With
/// `sweep_step_deg` the angle runs from the step up to 90 degrees.
pub fn cmd_accuracy(
    alpha_deg: f64,
    h_px: f64,
    fov_mm: f64,
    sensor_px: f64,
    sweep_step_deg: Option<f64>,
) -> Result<String> {
    if !(h_px > 0.0) || !(fov_mm > 0.0) || !(sensor_px > 0.0) {
        return Err(Error::Config(
            "h, field of view and sensor width must be positive".into(),
        ));
    }
    let mut angles = vec![alpha_deg];
    if let Some(step) = sweep_step_deg {
        if !(step > 0.0) {
            return Err(Error::Config(format!("sweep step must be positive, got {step}")));
        }
        let count = (90.0 / step + 1e-9).floor() as usize;
        angles = (1..=count).map(|k| k as f64 * step).collect();
    }
    let mut out = String::from("alpha_deg,h_px,dz_px,dx_px,dz_over_dx\n");
    for a in angles {
        let (dz, dx) = parallelogram_diagonals(a.to_radians(), h_px)?;
        let _ = writeln!(out, "{a},{h_px},{dz},{dx},{}", dz / dx);
    }
    let pitch_um = pixel_pitch(fov_mm * MICROMETRES_PER_MILLIMETRE, sensor_px);
    let _ = writeln!(out, "pixel_pitch_um,{pitch_um}");
    Ok(out)
}

/// Unknown and equation counts of the sheet problem.
pub fn cmd_dof(m: usize, n: usize) -> Result<String> {
    if m < 2 || n < 1 {
        return Err(Error::Config(format!(
            "need at least 2 cameras and 1 particle, got {m} and {n}"
        )));
    }
    let (unknowns, equations) = count_dof(m, n);
    Ok(format!(
        "cameras,particles,unknowns,equations\n{m},{n},{unknowns},{equations}\n"
    ))
}

/// Parses the first row of a [`cmd_accuracy`] table.
pub fn parse_accuracy_row(table: &str) -> Option<(f64, f64, f64, f64)> {
    let row = table.lines().nth(1)?;
    let v: Vec<f64> = row.split(',').map(|x| x.parse().ok()).collect::<Option<_>>()?;
    (v.len() == 5).then(|| (v[0], v[1], v[2], v[3]))
}
