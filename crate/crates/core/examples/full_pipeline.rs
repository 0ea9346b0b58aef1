//! synth, detect, match, pair and calibrate-sheet through the pipeline
//! commands, the same path the binary takes.
//!
//! `cargo run --example full_pipeline -- out_dir`

use lasersheet::pipeline::{self, CalibrationMode, PipelineConfig};

fn main() -> lasersheet::Result<()> {
    let root = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "pipeline_run".into()));
    let mut cfg = PipelineConfig::default();
    cfg.synth.min_separation_px = 14.0;
    cfg.output_dir = root.join("scene");
    let (truth, images) = pipeline::cmd_synth(&cfg)?;

    cfg.input.images = images;
    cfg.detect.threshold = 0.01;
    cfg.pair.tolerance_px = 7.0;
    cfg.calibrate.sheet_depth = Some(cfg.synth.depth);
    cfg.output_dir = root.join("run");
    let pairs = pipeline::cmd_pair(&cfg)?;
    let res = pipeline::cmd_calibrate(&cfg, CalibrationMode::Sheet)?;
    println!(
        "{} particles, {} pairs, reprojection rms {:.2e} px; outputs in {}",
        truth.points.len(),
        pairs.len(),
        res.rms_px,
        cfg.output_dir.display()
    );
    println!("{}", cfg.to_toml());
    Ok(())
}
