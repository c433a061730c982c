//! Saliency maps, fixation maps, the four benchmark metrics and the
//! temporal scene-dynamics measure.

mod dynamics;
mod maps;
mod metrics;

pub use dynamics::{scene_dynamics, SceneDynamics};
pub use maps::{FixationMap, SaliencyMap};
pub use metrics::{metric_auc, metric_cc, metric_nss, metric_sim, MetricRow};
