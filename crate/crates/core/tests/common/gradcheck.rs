//! Central finite-difference checks of the analytic gradients.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vigil_core::dsp::{HyperPatternWindow, Label};
use vigil_core::saliency::SaliencyMap;
use vigil_core::ssfcn::{ssfcn_loss_and_grad, SsfcnConfig, SsfcnParams, VideoClip};
use vigil_core::tcn::{backward, forward, Mode, TcnConfig, TcnParams};

pub const STEP: f64 = 1e-5;

/// Worst relative error over the checked coordinates.
#[derive(Debug, Clone, Copy)]
pub struct GradReport {
    pub coordinates: usize,
    pub max_rel_err: f64,
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

fn jitter(tensors: Vec<&mut Vec<f64>>, rng: &mut ChaCha8Rng) {
    for t in tensors {
        t.iter_mut().for_each(|v| *v += rng.gen_range(-0.2..0.2));
    }
}

/// `(tensor, index)` pairs drawn uniformly over all parameters.
fn pick(lengths: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let total: usize = lengths.iter().sum();
    sample(rng, total, count.min(total))
        .into_iter()
        .map(|mut flat| {
            let mut t = 0;
            while flat >= lengths[t] {
                flat -= lengths[t];
                t += 1;
            }
            (t, flat)
        })
        .collect()
}

/// Two blocks of four channels on a 3 x 32 window.
pub fn tcn_check(seed: u64, coordinates: usize, strict_causal: bool) -> GradReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = TcnConfig {
        num_blocks: 2,
        channels_per_block: 4,
        input_channels: 3,
        seed,
        strict_causal,
        ..TcnConfig::default()
    };
    let mut params = TcnParams::init(&cfg).unwrap();
    jitter(params.tensors_mut(), &mut rng);
    let data = (0..3 * 32).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let window = HyperPatternWindow::new(3, 32, data, 0)
        .unwrap()
        .with_label(Label::Wakeful);
    let class = 1;
    let loss = |p: &TcnParams| forward(p, &window, Mode::Eval).unwrap().loss(class);
    let fwd = forward(&params, &window, Mode::Eval).unwrap();
    let (_, grad) = backward(&params, &fwd, class).unwrap();
    let lengths: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    let mut worst: f64 = 0.0;
    let picks = pick(&lengths, coordinates, &mut rng);
    for &(t, i) in &picks {
        let analytic = grad.tensors()[t][i];
        let base = params.tensors()[t][i];
        params.tensors_mut()[t][i] = base + STEP;
        let up = loss(&params);
        params.tensors_mut()[t][i] = base - STEP;
        let down = loss(&params);
        params.tensors_mut()[t][i] = base;
        worst = worst.max(rel_err(analytic, (up - down) / (2.0 * STEP)));
    }
    GradReport {
        coordinates: picks.len(),
        max_rel_err: worst,
    }
}

/// Miniature saliency network: two encoder and two decoder blocks on a
/// 1 x 16 x 16 x 1 clip.
pub fn ssfcn_check(seed: u64, coordinates: usize, cfg: SsfcnConfig) -> GradReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = SsfcnParams::init(&SsfcnConfig {
        seed,
        ..cfg.clone()
    })
    .unwrap();
    jitter(params.tensors_mut(), &mut rng);
    let (t, c) = (cfg.clip_len, cfg.input_channels);
    let clip = VideoClip::new(
        t,
        16,
        16,
        c,
        (0..t * 16 * 16 * c).map(|_| rng.gen::<f64>()).collect(),
        10.0,
        0,
    )
    .unwrap();
    let target = SaliencyMap::new(16, 16, (0..256).map(|_| rng.gen::<f64>()).collect(), 0).unwrap();
    let (_, grad) = ssfcn_loss_and_grad(&params, &clip, &target).unwrap();
    let loss = |p: &SsfcnParams| ssfcn_loss_and_grad(p, &clip, &target).unwrap().0;
    let lengths: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    let mut worst: f64 = 0.0;
    let picks = pick(&lengths, coordinates, &mut rng);
    for &(ti, i) in &picks {
        let analytic = grad.tensors()[ti][i];
        let base = params.tensors()[ti][i];
        params.tensors_mut()[ti][i] = base + STEP;
        let up = loss(&params);
        params.tensors_mut()[ti][i] = base - STEP;
        let down = loss(&params);
        params.tensors_mut()[ti][i] = base;
        worst = worst.max(rel_err(analytic, (up - down) / (2.0 * STEP)));
    }
    GradReport {
        coordinates: picks.len(),
        max_rel_err: worst,
    }
}

pub fn miniature_ssfcn() -> SsfcnConfig {
    SsfcnConfig {
        clip_len: 1,
        encoder_channels: vec![3, 4],
        input_channels: 1,
        ..SsfcnConfig::default()
    }
}
