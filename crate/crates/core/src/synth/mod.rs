//! Synthetic stand-ins for the PPG recordings and driving clips.

mod clips;
mod ppg;

pub use clips::{
    gen_synthetic_clips, gen_synthetic_clips_with, BlobMotion, ClipSpec, SyntheticClip,
};
pub use ppg::{gen_synthetic_ppg, SyntheticPpg, SyntheticPpgSpec};
