use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use lasersheet::matching::{ClipRegion, SearchWindow, Similarity};
use lasersheet::pipeline::{self, CalibrationMode, PipelineConfig, RigKind};
use lasersheet::Result;

#[derive(Parser)]
#[command(
    name = "lasersheet",
    version,
    about = "Particle positions from two cameras viewing a laser sheet"
)]
struct Cli {
    /// TOML configuration; flags override its values.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (config: output_dir).
    #[arg(short, long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect particle features in images.
    Detect {
        images: Vec<PathBuf>,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Register the second image onto the first by template matching.
    Match {
        images: Vec<PathBuf>,
        #[command(flatten)]
        matching: MatchArgs,
    },
    /// Combine two images into a mosaic.
    Combine {
        images: Vec<PathBuf>,
        #[command(flatten)]
        matching: MatchArgs,
        /// Mosaic offset `du,dv`; matched when omitted (config: pair.offset).
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<i64>)]
        offset: Option<(i64, i64)>,
    },
    /// Pair features of two cameras.
    Pair {
        images: Vec<PathBuf>,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        matching: MatchArgs,
    },
    /// Cameras and particles with all particles on the plane z = 0.
    CalibratePlane(CalibrateArgs),
    /// Cameras and particles with all particles inside the sheet.
    CalibrateSheet(CalibrateArgs),
    /// Render a synthetic scene directory with ground truth.
    Synth(SynthArgs),
    /// Depth and lateral resolution of a camera pair.
    Accuracy {
        /// Vergence angle in degrees.
        #[arg(long, default_value_t = 11.0)]
        alpha: f64,
        /// Strip height in pixels.
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        /// Field of view width in millimetres.
        #[arg(long, default_value_t = 22.4)]
        fov: f64,
        /// Sensor width in pixels.
        #[arg(long, default_value_t = 1600.0)]
        sensor: f64,
        /// Tabulate angles from STEP to 90 degrees instead.
        #[arg(long, value_name = "STEP")]
        sweep: Option<f64>,
    },
    /// Unknowns and equations of the sheet problem.
    Dof { cameras: usize, particles: usize },
}

#[derive(Args)]
struct DetectArgs {
    /// Intensity threshold in [0, 1) (config: detect.threshold).
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    min_pixels: Option<usize>,
    #[arg(long)]
    max_pixels: Option<usize>,
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    stride: Option<usize>,
    /// Allowed offsets `du_min,du_max,dv_min,dv_max` (config: match.window).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_quad::<i64>)]
    window: Option<(i64, i64, i64, i64)>,
    /// Template clipping `x,y,width,height` of the second image.
    #[arg(long, value_parser = parse_quad::<usize>)]
    clip: Option<(usize, usize, usize, usize)>,
    /// `cosine` or `zero-mean-cosine`.
    #[arg(long, value_parser = parse_similarity)]
    similarity: Option<Similarity>,
    #[arg(long)]
    min_score: Option<f64>,
}

#[derive(Args)]
struct PairArgs {
    /// Feature CSVs of the two cameras instead of detecting.
    #[arg(long, num_args = 2)]
    features: Option<Vec<PathBuf>>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<i64>)]
    offset: Option<(i64, i64)>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct CalibrateArgs {
    images: Vec<PathBuf>,
    /// Correspondence CSV instead of images.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    detect: DetectArgs,
    #[command(flatten)]
    matching: MatchArgs,
    /// Sheet thickness in world units (config: calibrate.sheet_depth).
    #[arg(long)]
    sheet_depth: Option<f64>,
    #[arg(long)]
    vergence: Option<f64>,
    #[arg(long)]
    focal: Option<f64>,
    #[arg(long, value_parser = parse_pair::<usize>)]
    image_size: Option<(usize, usize)>,
    /// Starting camera files, one per camera.
    #[arg(long, num_args = 2)]
    cameras: Option<Vec<PathBuf>>,
    #[arg(long, overrides_with = "no_square_pixels")]
    square_pixels: bool,
    #[arg(long)]
    no_square_pixels: bool,
    #[arg(long)]
    fit_distortion: bool,
    #[arg(long)]
    eliminate_scales: bool,
    #[arg(long)]
    scale_row_weight: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// `translate` or `vergence`.
    #[arg(long, value_parser = parse_rig)]
    rig: Option<RigKind>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    depth: Option<f64>,
    #[arg(long)]
    vergence: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<i64>)]
    offset: Option<(i64, i64)>,
    #[arg(long)]
    focal: Option<f64>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    background: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Minimum distance between particle images in pixels.
    #[arg(long)]
    min_separation: Option<f64>,
}

fn split<T: FromStr, const N: usize>(s: &str) -> std::result::Result<[T; N], String> {
    let parts: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("bad number `{p}`")))
        .collect::<std::result::Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| format!("expected {N} comma-separated values"))
}

fn parse_pair<T: FromStr>(s: &str) -> std::result::Result<(T, T), String> {
    let [a, b] = split(s)?;
    Ok((a, b))
}

fn parse_quad<T: FromStr>(s: &str) -> std::result::Result<(T, T, T, T), String> {
    let [a, b, c, d] = split(s)?;
    Ok((a, b, c, d))
}

fn parse_similarity(s: &str) -> std::result::Result<Similarity, String> {
    match s {
        "cosine" => Ok(Similarity::Cosine),
        "zero-mean-cosine" => Ok(Similarity::ZeroMeanCosine),
        _ => Err("expected `cosine` or `zero-mean-cosine`".into()),
    }
}

fn parse_rig(s: &str) -> std::result::Result<RigKind, String> {
    match s {
        "translate" => Ok(RigKind::Translate),
        "vergence" => Ok(RigKind::Vergence),
        _ => Err("expected `translate` or `vergence`".into()),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl DetectArgs {
    fn apply(self, cfg: &mut PipelineConfig) {
        set(&mut cfg.detect.threshold, self.threshold);
        set(&mut cfg.detect.min_pixels, self.min_pixels);
        set(&mut cfg.detect.max_pixels, self.max_pixels);
    }
}

impl MatchArgs {
    fn apply(self, cfg: &mut PipelineConfig) {
        let m = &mut cfg.matching;
        set(&mut m.stride, self.stride);
        if let Some((du_min, du_max, dv_min, dv_max)) = self.window {
            m.window = Some(SearchWindow {
                du_min,
                du_max,
                dv_min,
                dv_max,
            });
        }
        if let Some((x, y, width, height)) = self.clip {
            m.clip = Some(ClipRegion { x, y, width, height });
        }
        set(&mut m.similarity, self.similarity);
        set(&mut m.min_score, self.min_score);
    }
}

impl PairArgs {
    fn apply(self, cfg: &mut PipelineConfig) {
        set(&mut cfg.input.features, self.features);
        if self.offset.is_some() {
            cfg.pair.offset = self.offset;
        }
        set(&mut cfg.pair.tolerance_px, self.tolerance);
    }
}

impl CalibrateArgs {
    fn apply(self, cfg: &mut PipelineConfig) {
        if !self.images.is_empty() {
            cfg.input.images = self.images;
        }
        if self.pairs.is_some() {
            cfg.input.pairs = self.pairs;
        }
        self.pair.apply(cfg);
        self.detect.apply(cfg);
        self.matching.apply(cfg);
        let c = &mut cfg.calibrate;
        if self.sheet_depth.is_some() {
            c.sheet_depth = self.sheet_depth;
        }
        set(&mut c.vergence_deg, self.vergence);
        set(&mut c.focal_px, self.focal);
        if self.image_size.is_some() {
            c.image_size = self.image_size;
        }
        set(&mut c.cameras, self.cameras);
        if self.square_pixels {
            c.square_pixels = true;
        }
        if self.no_square_pixels {
            c.square_pixels = false;
        }
        c.fit_distortion |= self.fit_distortion;
        c.eliminate_scales |= self.eliminate_scales;
        set(&mut c.scale_row_weight, self.scale_row_weight);
        set(&mut cfg.solver.max_iterations, self.max_iterations);
    }
}

impl SynthArgs {
    fn apply(self, cfg: &mut PipelineConfig) {
        let s = &mut cfg.synth;
        set(&mut s.rig, self.rig);
        set(&mut s.particles, self.particles);
        set(&mut s.depth, self.depth);
        set(&mut s.vergence_deg, self.vergence);
        set(&mut s.offset, self.offset);
        set(&mut s.focal_px, self.focal);
        set(&mut s.width, self.width);
        set(&mut s.height, self.height);
        set(&mut s.sigma_px, self.sigma);
        set(&mut s.background, self.background);
        set(&mut s.noise, self.noise);
        set(&mut s.seed, self.seed);
        set(&mut s.min_separation_px, self.min_separation);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    set(&mut cfg.output_dir, cli.output_dir);
    let set_images = |cfg: &mut PipelineConfig, images: Vec<PathBuf>| {
        if !images.is_empty() {
            cfg.input.images = images;
        }
    };

    match cli.command {
        Command::Detect { images, detect } => {
            set_images(&mut cfg, images);
            detect.apply(&mut cfg);
            cfg.validate()?;
            for (i, feats) in pipeline::cmd_detect(&cfg)?.iter().enumerate() {
                println!("camera {i}: {} features", feats.len());
            }
        }
        Command::Match { images, matching } => {
            set_images(&mut cfg, images);
            matching.apply(&mut cfg);
            cfg.validate()?;
            let est = pipeline::cmd_match(&cfg)?;
            println!("offset {} {} score {}", est.offset.0, est.offset.1, est.score);
            for w in &est.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Combine {
            images,
            matching,
            offset,
        } => {
            set_images(&mut cfg, images);
            matching.apply(&mut cfg);
            if offset.is_some() {
                cfg.pair.offset = offset;
            }
            cfg.validate()?;
            let mosaic = pipeline::cmd_combine(&cfg)?;
            println!("mosaic {}x{}", mosaic.width(), mosaic.height());
        }
        Command::Pair {
            images,
            pair,
            detect,
            matching,
        } => {
            set_images(&mut cfg, images);
            pair.apply(&mut cfg);
            detect.apply(&mut cfg);
            matching.apply(&mut cfg);
            cfg.validate()?;
            let set = pipeline::cmd_pair(&cfg)?;
            println!("{} pairs at offset {} {}", set.len(), set.offset.0, set.offset.1);
        }
        Command::CalibratePlane(args) => calibrate(cfg, args, CalibrationMode::Plane)?,
        Command::CalibrateSheet(args) => calibrate(cfg, args, CalibrationMode::Sheet)?,
        Command::Synth(args) => {
            args.apply(&mut cfg);
            cfg.validate()?;
            let (truth, paths) = pipeline::cmd_synth(&cfg)?;
            println!(
                "{} particles, {} images in {}",
                truth.points.len(),
                paths.len(),
                cfg.output_dir.display()
            );
        }
        Command::Accuracy {
            alpha,
            h,
            fov,
            sensor,
            sweep,
        } => {
            print!("{}", pipeline::cmd_accuracy(alpha, h, fov, sensor, sweep)?);
        }
        Command::Dof { cameras, particles } => {
            print!("{}", pipeline::cmd_dof(cameras, particles)?);
        }
    }
    Ok(())
}

fn calibrate(mut cfg: PipelineConfig, args: CalibrateArgs, mode: CalibrationMode) -> Result<()> {
    args.apply(&mut cfg);
    cfg.validate()?;
    let res = pipeline::cmd_calibrate(&cfg, mode)?;
    println!(
        "{} particles, reprojection rms {:e} px, {:?} after {} iterations",
        res.points.len(),
        res.rms_px,
        res.report.termination,
        res.report.iterations
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
