//! Writes a synthetic two-camera scene with its ground truth.
//!
//! `cargo run --example synthetic_scene -- out_dir`

use lasersheet::geometry::write_camera_file;
use lasersheet::imgcore::BitDepth;
use lasersheet::synth::{generate_scene, scene_spec, vergence_pair};

fn main() -> lasersheet::Result<()> {
    let dir = std::path::PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "synthetic_scene".into()),
    );
    std::fs::create_dir_all(&dir).map_err(|e| lasersheet::Error::io(&dir, e))?;

    let cams = vergence_pair(1000.0, 200, 150, (40.0, 0.0), 11f64.to_radians())?;
    let mut spec = scene_spec(cams, 200, 150, 18, 20.0, 1);
    spec.noise = 0.02;
    let (truth, images) = generate_scene(&spec)?;
    for (i, img) in images.iter().enumerate() {
        img.write_pgm(dir.join(format!("camera_{i}.pgm")), BitDepth::Sixteen)?;
        write_camera_file(dir.join(format!("camera_{i}.cam")), &truth.cameras[i])?;
    }
    std::fs::write(dir.join("truth.json"), truth.to_json()).map_err(|e| lasersheet::Error::io(&dir, e))?;
    println!("{} particles written to {}", truth.points.len(), dir.display());
    Ok(())
}
