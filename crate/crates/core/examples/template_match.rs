//! Registers a translated image pair and builds the mosaic.
//!
//! `cargo run --example template_match`

use lasersheet::matching::{combine_images, estimate_offset, OffsetOptions};
use lasersheet::synth::{generate_scene, scene_spec, translate_pair};

fn main() -> lasersheet::Result<()> {
    let cams = translate_pair(1000.0, 200, 150, (37, -4));
    let (truth, images) = generate_scene(&scene_spec(cams, 200, 150, 60, 0.0, 3))?;

    let est = estimate_offset(&images[0], &images[1], &OffsetOptions::default())?;
    println!(
        "offset {:?} (truth {:?}), score {:.6}",
        est.offset,
        truth.offset.unwrap(),
        est.score
    );

    let mosaic = combine_images(&images[0], &images[1], est.offset);
    println!("mosaic {}x{}", mosaic.width(), mosaic.height());
    Ok(())
}
