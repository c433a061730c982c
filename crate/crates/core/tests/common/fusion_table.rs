//! The 20-case decision grid, with expectations written out by hand.

use vigil_core::fusion::{decide, AttentionClass, FusionConfig, SceneClass};
use vigil_core::saliency::SceneDynamics;
use vigil_core::tcn::AttentionScore;

use AttentionClass::{High, MediumLow};
use SceneClass::{Dynamic, Static};

pub const SCORES: [f64; 5] = [0.0, 0.3, 0.6, 0.61, 1.0];
pub const GRADIENTS: [f64; 5] = [0.0, 0.44, 0.45, 0.46, 1.0];

/// Rows follow `SCORES`; columns follow `GRADIENTS`.
const TABLE: [[(AttentionClass, SceneClass, bool); 5]; 5] = {
    const fn row(a: AttentionClass, low_alerts: bool) -> [(AttentionClass, SceneClass, bool); 5] {
        [
            (a, Static, false),
            (a, Static, false),
            (a, Static, false),
            (a, Dynamic, low_alerts),
            (a, Dynamic, low_alerts),
        ]
    }
    [
        row(MediumLow, true),
        row(MediumLow, true),
        row(MediumLow, true),
        row(High, false),
        row(High, false),
    ]
};

/// Returns one message per mismatching cell.
pub fn check() -> Vec<String> {
    let cfg = FusionConfig::default();
    let mut failures = Vec::new();
    for (i, &s) in SCORES.iter().enumerate() {
        for (j, &g) in GRADIENTS.iter().enumerate() {
            let d = decide(
                &AttentionScore::new(s, 0).unwrap(),
                &SceneDynamics::new(g, 0).unwrap(),
                &cfg,
            )
            .unwrap();
            let got = (d.attention_class, d.scene_class, d.alert);
            if got != TABLE[i][j] {
                failures.push(format!(
                    "score {s}, gradient {g}: got {got:?}, expected {:?}",
                    TABLE[i][j]
                ));
            }
        }
    }
    failures
}
