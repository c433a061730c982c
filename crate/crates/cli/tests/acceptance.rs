//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any of them fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{bank_response, causality, fusion_table, gradcheck, metric_suite};
use vigil_core::config::RunConfig;
use vigil_core::harness::{synthetic_ppg_dataset, train_tcn, PpgDatasetSpec, TcnRun};
use vigil_core::saliency::metric_cc;
use vigil_core::ssfcn::{self, bce_loss, SsfcnParams};
use vigil_core::synth::gen_synthetic_clips;
use vigil_core::tcn;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            ok,
            detail: detail.into(),
        }
    }
}

fn tcn_run() -> &'static TcnRun {
    static RUN: OnceLock<TcnRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = RunConfig::default();
        let data =
            synthetic_ppg_dataset(&PpgDatasetSpec::default(), &cfg.dsp, cfg.seed).expect("dataset");
        assert_eq!(data.len(), 400);
        train_tcn(&cfg, &data).expect("training")
    })
}

fn filter_bank() -> Outcome {
    let channels = bank_response::measure(50.0, 501);
    let worst_stop = channels
        .iter()
        .map(|c| c.stopband_db)
        .fold(f64::INFINITY, f64::min);
    let worst_pass = channels
        .iter()
        .map(|c| c.passband_dev_db)
        .fold(0.0, f64::max);
    Outcome::new(
        channels.len() == 22 && worst_stop >= 50.0 && worst_pass <= 0.1,
        format!(
            "{} channels, worst stopband {worst_stop:.2} dB, worst passband deviation {worst_pass:.4} dB",
            channels.len()
        ),
    )
}

fn causality_trials() -> Outcome {
    let failures: Vec<String> = (0..100)
        .filter_map(|s| causality::trial(5000 + s).err())
        .collect();
    let detail = match failures.first() {
        None => "100 trials bit-exact".to_string(),
        Some(f) => format!("{} of 100 trials failed, first: {f}", failures.len()),
    };
    Outcome::new(failures.is_empty(), detail)
}

fn gradient_checks() -> Outcome {
    let t = gradcheck::tcn_check(71, 32, true);
    let s = gradcheck::ssfcn_check(72, 32, gradcheck::miniature_ssfcn());
    let ok =
        t.coordinates >= 20 && s.coordinates >= 20 && t.max_rel_err < 1e-5 && s.max_rel_err < 1e-5;
    Outcome::new(
        ok,
        format!(
            "tcn {} coords max rel err {:.2e}; ssfcn {} coords max rel err {:.2e}",
            t.coordinates, t.max_rel_err, s.coordinates, s.max_rel_err
        ),
    )
}

fn classification() -> Outcome {
    let run = tcn_run();
    Outcome::new(
        run.n_train + run.n_test == 400 && run.n_test == 120 && run.test_accuracy >= 0.95,
        format!(
            "train {} windows acc {:.4}, test {} windows acc {:.4}",
            run.n_train, run.train_accuracy, run.n_test, run.test_accuracy
        ),
    )
}

fn metric_oracles() -> Outcome {
    let mut failures = metric_suite::random_instances(200, 500);
    failures.extend(metric_suite::identities(501));
    let detail = match failures.first() {
        None => "200 random instances and all identities agree".to_string(),
        Some(f) => format!("{} mismatches, first: {f}", failures.len()),
    };
    Outcome::new(failures.is_empty(), detail)
}

fn ssfcn_overfit() -> Outcome {
    let cfg = RunConfig::default();
    let clips = gen_synthetic_clips(4, 7).expect("clips");
    let data: Vec<_> = clips
        .iter()
        .map(|c| (c.clip.clone(), c.truth.clone()))
        .collect();
    let params = SsfcnParams::init(&cfg.ssfcn_config()).expect("init");
    let (params, _) = ssfcn::train(params, &data, &cfg.ssfcn_train).expect("training");
    let mut loss = 0.0;
    let mut ccs = Vec::new();
    for (clip, truth) in &data {
        let trace = ssfcn::trace(&params, clip).expect("forward");
        loss += bce_loss(trace.logits(), truth.values()) / data.len() as f64;
        ccs.push(metric_cc(&trace.map(), truth).expect("cc"));
    }
    let worst = ccs.iter().copied().fold(f64::INFINITY, f64::min);
    let shown: Vec<String> = ccs.iter().map(|c| format!("{c:.3}")).collect();
    Outcome::new(
        loss < 0.05 && worst > 0.95,
        format!("final BCE {loss:.4}, per-clip CC [{}]", shown.join(", ")),
    )
}

fn fusion_table() -> Outcome {
    let failures = fusion_table::check();
    let detail = match failures.first() {
        None => "20 cases match".to_string(),
        Some(f) => format!("{} mismatches, first: {f}", failures.len()),
    };
    Outcome::new(failures.is_empty(), detail)
}

fn vigil(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vigil"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "vigil {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn end_to_end() -> Result<Outcome, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    tcn::save_checkpoint(&tcn_run().params, &d.join("tcn.ckpt")).map_err(|e| e.to_string())?;
    // Held-out recordings: rec_000 is drowsy and rec_001 wakeful.
    vigil(
        d,
        &[
            "--seed",
            "8",
            "gen-ppg",
            "--per-class",
            "1",
            "--windows-per-recording",
            "12",
            "--out",
            "ppg",
        ],
    )?;
    let scene = [
        "gen-clips",
        "--count",
        "1",
        "--frames",
        "600",
        "--size",
        "32",
        "--sigma",
        "8",
        "--flatness",
        "4",
    ];
    vigil(
        d,
        &[&scene[..], &["--motion", "jump", "--out", "dynamic"]].concat(),
    )?;
    vigil(
        d,
        &[&scene[..], &["--motion", "static", "--out", "static"]].concat(),
    )?;

    let replay = |ppg: &str, maps: &str, out: &str| -> Result<String, String> {
        let args = [
            "--seed", "8", "replay", "--model", "tcn.ckpt", "--ppg", ppg, "--maps", maps, "--out",
            out,
        ];
        vigil(d, &args)?;
        std::fs::read_to_string(d.join(out)).map_err(|e| e.to_string())
    };
    let alerts = |log: &str| {
        log.lines()
            .filter(|l| l.ends_with("\"alert\":true}"))
            .count()
    };
    let hot = replay("ppg/rec_000.csv", "dynamic/clip_000/truth", "hot_a.jsonl")?;
    let hot_again = replay("ppg/rec_000.csv", "dynamic/clip_000/truth", "hot_b.jsonl")?;
    let calm = replay("ppg/rec_001.csv", "static/clip_000/truth", "calm_a.jsonl")?;
    let calm_again = replay("ppg/rec_001.csv", "static/clip_000/truth", "calm_b.jsonl")?;
    let identical = hot == hot_again && calm == calm_again;
    let (hot_alerts, calm_alerts) = (alerts(&hot), alerts(&calm));
    Ok(Outcome::new(
        identical && !hot.is_empty() && !calm.is_empty() && hot_alerts >= 1 && calm_alerts == 0,
        format!(
            "logs identical across runs: {identical}; drowsy+dynamic {hot_alerts} alerts in {} windows; \
             wakeful+static {calm_alerts} alerts in {} windows",
            hot.lines().count(),
            calm.lines().count()
        ),
    ))
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Option<Duration>, Check); 8] = [
        (
            "filter bank response",
            Some(Duration::from_secs(10)),
            filter_bank,
        ),
        (
            "tcn causality",
            Some(Duration::from_secs(30)),
            causality_trials,
        ),
        (
            "gradient checks",
            Some(Duration::from_secs(120)),
            gradient_checks,
        ),
        (
            "synthetic drowsiness classification",
            Some(Duration::from_secs(600)),
            classification,
        ),
        (
            "metric oracle equivalence",
            Some(Duration::from_secs(30)),
            metric_oracles,
        ),
        (
            "ss-fcn overfit",
            Some(Duration::from_secs(900)),
            ssfcn_overfit,
        ),
        (
            "fusion truth table",
            Some(Duration::from_secs(1)),
            fusion_table,
        ),
        ("end-to-end determinism", None, || {
            end_to_end().unwrap_or_else(|e| Outcome::new(false, e))
        }),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let in_time = budget.is_none_or(|b| took < b);
        let ok = outcome.ok && in_time;
        failed += usize::from(!ok);
        let limit = budget.map_or(String::new(), |b| format!(" of {} s", b.as_secs()));
        println!(
            "acceptance {} {name}: {} ({}; {:.1} s{limit})",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of 8 acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}
