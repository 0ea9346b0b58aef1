//! Normalized cosine similarity of a few vectors.
//!
//! `cargo run --example similarity`

use lasersheet::matching::normalized_cosine_similarity;

fn main() -> lasersheet::Result<()> {
    let a = [1.0, 2.0, 3.0];
    for (name, b) in [
        ("same", [1.0, 2.0, 3.0]),
        ("scaled", [10.0, 20.0, 30.0]),
        ("orthogonal", [3.0, 0.0, -1.0]),
        ("opposite", [-1.0, -2.0, -3.0]),
    ] {
        println!("{name:>10}: {:.4}", normalized_cosine_similarity(&a, &b)?);
    }
    Ok(())
}
