//! Grayscale images, raster I/O, and blob-style particle detection.

mod detect;
mod image;

pub use self::detect::{detect_features, read_features_csv, write_features_csv, Feature2D};
pub use self::image::{decode_pgm, encode_pgm, load_image, BitDepth, Image};
