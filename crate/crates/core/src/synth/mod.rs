//! Synthetic particle scenes with full ground truth.

mod rigs;
mod rng;
mod scene;

pub use rigs::{scene_spec, translate_pair, vergence_pair};
pub use rng::{SceneRng, GENERATOR_NAME};
pub use scene::{generate_scene, GroundTruth, SamplingRegion, SceneSpec};

#[cfg(test)]
mod tests;
