//! Suffix-replacement trials for the causal network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vigil_core::dsp::HyperPatternWindow;
use vigil_core::tcn::{forward, DilationSchedule, Mode, TcnConfig, TcnParams};

/// Runs one trial; returns a description of the first violation, if any.
///
/// A random network and input are drawn, inputs at indices `>= cut` are
/// replaced by fresh noise, and every activation at indices `< cut` (and at
/// `cut` itself in strict mode) must be bit-identical.
pub fn trial(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = TcnConfig {
        num_blocks: rng.gen_range(1..=4),
        kernel_size: rng.gen_range(2..=4),
        dilation_schedule: if rng.gen() {
            DilationSchedule::Increment
        } else {
            DilationSchedule::Doubling
        },
        channels_per_block: rng.gen_range(2..=6),
        input_channels: rng.gen_range(1..=5),
        strict_causal: rng.gen(),
        seed,
        ..TcnConfig::default()
    };
    let params = TcnParams::init(&cfg).unwrap();
    let len = rng.gen_range(2..=80);
    let cut = rng.gen_range(0..len);
    let cin = cfg.input_channels;
    let x: Vec<f64> = (0..cin * len).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut y = x.clone();
    for c in 0..cin {
        for t in cut..len {
            y[c * len + t] = rng.gen_range(-3.0..3.0);
        }
    }
    let mode = if rng.gen() {
        Mode::Eval
    } else {
        Mode::Train { dropout_seed: seed }
    };
    let a = forward(
        &params,
        &HyperPatternWindow::new(cin, len, x, 0).unwrap(),
        mode,
    )
    .unwrap();
    let b = forward(
        &params,
        &HyperPatternWindow::new(cin, len, y, 0).unwrap(),
        mode,
    )
    .unwrap();
    let protected = if cfg.strict_causal { cut + 1 } else { cut };
    for (k, (ta, tb)) in a.activations().iter().zip(b.activations()).enumerate() {
        for (row, (ra, rb)) in ta.chunks_exact(len).zip(tb.chunks_exact(len)).enumerate() {
            for t in 0..protected.min(len) {
                if ra[t].to_bits() != rb[t].to_bits() {
                    return Err(format!(
                        "seed {seed}: activation {k} row {row} t {t} changed (cut {cut}, {cfg:?})"
                    ));
                }
            }
        }
    }
    Ok(())
}
