//! Reconstruction of particle positions seen by two or more cameras that
//! observe a thin laser-illuminated volume.
//!
//! The crate covers the whole chain:
//!
//! - [`imgcore`]: grayscale images, PGM/PNG I/O, and blob detection with
//!   intensity-weighted subpixel centroids.
//! - [`geometry`]: pinhole cameras with rational distortion, and the
//!   view-direction accuracy of a two-camera setup.
//! - [`matching`]: translation-only template matching with normalized cosine
//!   similarity, mosaicking, and correspondence pairing.
//! - [`optimize`]: a dense Levenberg-Marquardt solver and the bundle problems
//!   that confine particles to a plane (`z = 0`) or a sheet (`|z| <= d/2`).
//! - [`synth`]: seeded synthetic scenes with full ground truth.
//! - [`pipeline`]: batch commands that tie everything together, used by the
//!   `lasersheet` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod error;
pub mod geometry;
pub mod imgcore;
pub mod matching;
pub mod optimize;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
