//! Dataset building, training and evaluation drivers, and stream replay.
//! The `vigil` command-line tool is a thin layer over these functions.

mod clips;
mod ppg;
mod replay;

pub use clips::{
    eval_saliency, list_stems, load_frames, load_training_pairs, predict_clip_dir,
    train_ssfcn_dirs, write_clip_dir, write_synthetic_clips, TrainingPair,
};
pub use ppg::{
    ppg_to_windows, read_manifest, split_indices, synthetic_ppg_dataset, synthetic_ppg_recordings,
    train_tcn, windows_from_manifest, write_manifest, write_synthetic_ppg, PpgDatasetSpec, TcnRun,
};
pub use replay::{load_map_sequence, replay, replay_files, ReplayOutput};
