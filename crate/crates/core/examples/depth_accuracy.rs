//! Depth and lateral resolution against vergence angle.
//!
//! `cargo run --example depth_accuracy`

use lasersheet::geometry::{parallelogram_diagonals, pixel_pitch};

fn main() -> lasersheet::Result<()> {
    println!("alpha  dz/px   dx/px");
    for deg in [5.0, 11.0, 30.0, 60.0, 90.0] {
        let (dz, dx) = parallelogram_diagonals(f64::to_radians(deg), 1.0)?;
        println!("{deg:5.1} {dz:7.3} {dx:7.3}");
    }
    println!("pixel pitch {} um", pixel_pitch(22.4e3, 1600.0));
    Ok(())
}
