//! Metric checks against the brute-force oracles, shared by the metric
//! integration test and the acceptance run.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vigil_core::saliency::{
    metric_auc, metric_cc, metric_nss, metric_sim, scene_dynamics, FixationMap, SaliencyMap,
};

use super::oracles;

fn map(h: usize, w: usize, v: Vec<f64>) -> SaliencyMap {
    SaliencyMap::new(h, w, v, 0).unwrap()
}

fn check(failures: &mut Vec<String>, what: &str, got: f64, want: f64, tol: f64) {
    if !((got - want).abs() <= tol) {
        failures.push(format!("{what}: got {got}, expected {want} (tol {tol:e})"));
    }
}

/// Random 8x8 instances compared with the oracles at 1e-9. Every other
/// prediction is quantized to tenths so AUC sees tied values.
pub fn random_instances(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..count {
        let mut pred: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
        if case % 2 == 1 {
            pred.iter_mut()
                .for_each(|v| *v = (*v * 10.0).round() / 10.0);
        }
        let truth: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
        let k = rng.gen_range(1..=10);
        let mut fix = vec![false; 64];
        for i in sample(&mut rng, 64, k) {
            fix[i] = true;
        }
        let p = map(8, 8, pred.clone());
        let t = map(8, 8, truth.clone());
        let f = FixationMap::new(8, 8, fix.clone()).unwrap();
        let tag = |m: &str| format!("case {case} {m}");
        check(
            &mut failures,
            &tag("auc"),
            metric_auc(&p, &f).unwrap(),
            oracles::auc_judd(&pred, &fix),
            1e-9,
        );
        check(
            &mut failures,
            &tag("nss"),
            metric_nss(&p, &f).unwrap(),
            oracles::nss(&pred, &fix),
            1e-9,
        );
        check(
            &mut failures,
            &tag("cc"),
            metric_cc(&p, &t).unwrap(),
            oracles::cc(&pred, &truth),
            1e-9,
        );
        check(
            &mut failures,
            &tag("sim"),
            metric_sim(&p, &t).unwrap(),
            oracles::sim(&pred, &truth),
            1e-9,
        );

        let frames = rng.gen_range(2..=6);
        let seq: Vec<Vec<f64>> = (0..frames)
            .map(|_| (0..64).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let maps: Vec<SaliencyMap> = seq.iter().map(|v| map(8, 8, v.clone())).collect();
        check(
            &mut failures,
            &tag("scene_dynamics"),
            scene_dynamics(&maps).unwrap().gradient,
            oracles::scene_gradient(&seq),
            1e-9,
        );
    }
    failures
}

/// The closed-form identities.
pub fn identities(seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let a: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
    let pa = map(8, 8, a.clone());
    let inv = map(8, 8, a.iter().map(|v| 1.0 - v).collect());
    check(
        &mut failures,
        "cc(a, a)",
        metric_cc(&pa, &pa).unwrap(),
        1.0,
        1e-12,
    );
    check(
        &mut failures,
        "cc(a, 1 - a)",
        metric_cc(&pa, &inv).unwrap(),
        -1.0,
        1e-12,
    );
    check(
        &mut failures,
        "sim(a, a)",
        metric_sim(&pa, &pa).unwrap(),
        1.0,
        1e-12,
    );

    let mut fix = vec![false; 64];
    for i in [3, 17, 40, 41, 63] {
        fix[i] = true;
    }
    let f = FixationMap::new(8, 8, fix.clone()).unwrap();
    let constant = map(8, 8, vec![0.4; 64]);
    check(
        &mut failures,
        "auc(constant)",
        metric_auc(&constant, &f).unwrap(),
        0.5,
        1e-12,
    );
    let exact = map(
        8,
        8,
        fix.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
    );
    check(
        &mut failures,
        "auc(pred = fix)",
        metric_auc(&exact, &f).unwrap(),
        1.0,
        1e-12,
    );

    let everywhere = FixationMap::new(8, 8, vec![true; 64]).unwrap();
    check(
        &mut failures,
        "nss(all pixels)",
        metric_nss(&pa, &everywhere).unwrap(),
        0.0,
        1e-12,
    );
    let two = map(2, 2, vec![1.0, 0.0, 0.0, 0.0]);
    let corner = FixationMap::from_points(2, 2, &[(0, 0)]).unwrap();
    check(
        &mut failures,
        "nss(2x2)",
        metric_nss(&two, &corner).unwrap(),
        3f64.sqrt(),
        1e-12,
    );

    let left = map(2, 2, vec![1.0, 0.0, 1.0, 0.0]);
    let right = map(2, 2, vec![0.0, 1.0, 0.0, 1.0]);
    check(
        &mut failures,
        "sim(disjoint)",
        metric_sim(&left, &right).unwrap(),
        0.0,
        1e-12,
    );

    let same = vec![pa.clone(), pa.clone(), pa];
    check(
        &mut failures,
        "scene(identical)",
        scene_dynamics(&same).unwrap().gradient,
        0.0,
        0.0,
    );
    let flip: Vec<SaliencyMap> = (0..5)
        .map(|i| map(8, 8, vec![(i % 2) as f64; 64]))
        .collect();
    check(
        &mut failures,
        "scene(alternating)",
        scene_dynamics(&flip).unwrap().gradient,
        1.0,
        0.0,
    );
    failures
}
