//! Renders a synthetic image and detects its particles.
//!
//! `cargo run --example detect_particles`

use lasersheet::imgcore::detect_features;
use lasersheet::synth::{generate_scene, scene_spec, vergence_pair};

fn main() -> lasersheet::Result<()> {
    let cams = vergence_pair(1000.0, 200, 150, (40.0, 0.0), 11f64.to_radians())?;
    let mut spec = scene_spec(cams, 200, 150, 18, 20.0, 7);
    spec.min_separation_px = 14.0;
    let (truth, images) = generate_scene(&spec)?;

    let features = detect_features(&images[0], 0.01, 3, 2000);
    println!(
        "{} features, {} particles visible",
        features.len(),
        truth.visible(0).len()
    );
    for f in features.iter().take(5) {
        println!(
            "  ({:8.3}, {:8.3}) peak {:.3} mass {:.2} over {} px",
            f.u, f.v, f.peak, f.mass, f.pixel_count
        );
    }
    Ok(())
}
