//! Batch commands tying detection, matching, pairing, calibration and scene
//! synthesis together. Every command writes into the configured output
//! directory together with a `provenance.json` echoing the configuration.

mod commands;
mod config;

pub use commands::{
    cmd_accuracy, cmd_calibrate, cmd_combine, cmd_detect, cmd_dof, cmd_match, cmd_pair, cmd_synth,
    parse_accuracy_row, CalibrationMode, OffsetRecord, FEATURES_FILE_PREFIX, HEATMAP_FILE, MOSAIC_FILE,
    OFFSET_FILE, PAIRS_FILE, POINTS_FILE, PROVENANCE_FILE, REPORT_FILE, RESULT_FILE, SCENE_FILE, TRUTH_FILE,
};
pub use config::{
    CalibrateConfig, DetectConfig, InputConfig, MatchConfig, PairConfig, PipelineConfig, RigKind, SynthConfig,
};
