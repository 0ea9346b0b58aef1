//! Translation-only registration of overlapping camera views and pairing of
//! the features that fall on top of each other in the combined frame.

mod mosaic;
mod pairing;
mod similarity;
mod template;

pub use mosaic::{combine_images, mosaic_origin};
pub use pairing::{
    pair_correspondences, read_correspondences_csv, write_correspondences_csv, Correspondence,
    CorrespondenceSet,
};
pub use similarity::{normalized_cosine_similarity, similarity, Similarity};
pub use template::{
    estimate_offset, template_match, template_match_in, ClipRegion, MatchOptions, MatchResult,
    OffsetEstimate, OffsetOptions, ScoreMap, SearchWindow,
};
