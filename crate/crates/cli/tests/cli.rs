use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vigil(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vigil"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn vigil")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = vigil(dir, args);
    assert!(
        out.status.success(),
        "vigil {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    vigil(dir, args).status.code().expect("exit code")
}

fn write(path: &Path, text: &str) -> PathBuf {
    std::fs::write(path, text).unwrap();
    path.to_path_buf()
}

#[test]
fn usage_errors_and_help() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(dir.path(), &["--help"]), 0);
    assert_eq!(code(dir.path(), &["--version"]), 0);
    assert_eq!(code(dir.path(), &[]), 4);
    assert_eq!(code(dir.path(), &["no-such-command"]), 4);
    assert_eq!(code(dir.path(), &["replay", "--ppg", "x.csv"]), 4);
}

#[test]
fn config_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("unknown.cfg"), "tcn.colour = 3\n");
    write(
        &dir.path().join("invalid.cfg"),
        "fusion.debounce_windows = 0\n",
    );
    for cfg in ["unknown.cfg", "invalid.cfg"] {
        let out = vigil(dir.path(), &["--config", cfg, "gen-ppg", "--out", "p"]);
        assert_eq!(out.status.code(), Some(4));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(
            err.contains("tcn.colour") || err.contains("fusion.debounce_windows"),
            "{err}"
        );
    }
    assert_eq!(code(dir.path(), &["--config", "missing.cfg", "gen-ppg"]), 2);
}

#[test]
fn generators_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (seed, out) in [("5", "a"), ("5", "b"), ("6", "c")] {
        ok(
            d,
            &[
                "--seed",
                seed,
                "gen-ppg",
                "--per-class",
                "1",
                "--windows-per-recording",
                "2",
                "--out",
                out,
            ],
        );
    }
    let read = |p: &str| std::fs::read(d.join(p)).unwrap();
    assert_eq!(read("a/rec_000.csv"), read("b/rec_000.csv"));
    assert_ne!(read("a/rec_000.csv"), read("c/rec_000.csv"));
    let manifest = String::from_utf8(read("a/labels.csv")).unwrap();
    assert_eq!(
        manifest,
        "path,label\nrec_000.csv,drowsy\nrec_001.csv,wakeful\n"
    );
}

#[test]
fn filter_exports_taps_and_channels() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen-ppg",
            "--per-class",
            "1",
            "--windows-per-recording",
            "1",
            "--out",
            "ppg",
        ],
    );
    ok(d, &["filter", "--ppg", "ppg/rec_000.csv", "--out", "f"]);
    let hyper = std::fs::read_to_string(d.join("f/hyper.csv")).unwrap();
    let header = hyper.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 23);
    assert!(header.starts_with("t_ms,ch01,"));
    let taps = |ch: &str| {
        std::fs::read_to_string(d.join(format!("f/taps/ch_{ch}.csv")))
            .unwrap()
            .lines()
            .count()
    };
    // Header plus one line per tap; channel 1 is a single high-pass stage.
    assert_eq!(taps("01"), 1 + 501);
    assert_eq!(taps("02"), 1 + 1001);
    assert_eq!(taps("22"), 1 + 1001);
}

#[test]
fn train_tcn_writes_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        &d.join("quick.cfg"),
        "# small and fast\ntcn.num_blocks = 2\ntcn.epochs = 2\n",
    );
    ok(
        d,
        &[
            "gen-ppg",
            "--per-class",
            "2",
            "--windows-per-recording",
            "3",
            "--out",
            "ppg",
        ],
    );
    let stdout = ok(
        d,
        &[
            "--config",
            "quick.cfg",
            "train-tcn",
            "--manifest",
            "ppg/labels.csv",
            "--out",
            "tcn",
        ],
    );
    assert!(stdout.contains("accuracy"), "{stdout}");
    assert_eq!(
        &std::fs::read(d.join("tcn/tcn.ckpt")).unwrap()[..4],
        b"TCN1"
    );
    let loss = std::fs::read_to_string(d.join("tcn/loss.csv")).unwrap();
    assert_eq!(loss.lines().count(), 3);
    assert!(loss.starts_with("epoch,loss\n"));
}

#[test]
fn saliency_training_prediction_and_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        &d.join("tiny.cfg"),
        "ssfcn.encoder_channels = 2, 3\nssfcn.steps = 2\nssfcn.clip_len = 4\n",
    );
    ok(
        d,
        &[
            "gen-clips",
            "--count",
            "2",
            "--frames",
            "6",
            "--size",
            "16",
            "--out",
            "clips",
        ],
    );
    ok(
        d,
        &[
            "--config",
            "tiny.cfg",
            "train-ssfcn",
            "--clips",
            "clips",
            "--out",
            "s",
        ],
    );
    assert_eq!(
        &std::fs::read(d.join("s/ssfcn.ckpt")).unwrap()[..4],
        b"SSF1"
    );
    assert!(d.join("s/pred/clip_000/frame_000003.pgm").is_file());
    assert!(d.join("s/pred/clip_000/frame_000003.f64").is_file());

    ok(
        d,
        &[
            "eval-saliency",
            "--pred",
            "clips/clip_000/truth",
            "--truth",
            "clips/clip_000/truth",
            "--fixations",
            "clips/clip_000/fixations",
            "--out",
            "m.csv",
        ],
    );
    let csv = std::fs::read_to_string(d.join("m.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("frame,auc,nss,cc,sim"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let f: Vec<f64> = row.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        assert!(
            (f[2] - 1.0).abs() < 1e-9 && (f[3] - 1.0).abs() < 1e-9,
            "{row}"
        );
    }

    ok(
        d,
        &[
            "eval-saliency",
            "--pred",
            "s/pred/clip_001",
            "--truth",
            "clips/clip_001/truth",
            "--fixations",
            "clips/clip_001/fixations",
            "--out",
            "p.csv",
        ],
    );
}

#[test]
fn replay_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(&d.join("quick.cfg"), "tcn.num_blocks = 1\ntcn.epochs = 1\n");
    ok(
        d,
        &[
            "gen-ppg",
            "--per-class",
            "1",
            "--windows-per-recording",
            "2",
            "--out",
            "ppg",
        ],
    );
    ok(
        d,
        &[
            "--config",
            "quick.cfg",
            "train-tcn",
            "--manifest",
            "ppg/labels.csv",
            "--out",
            "tcn",
        ],
    );
    // The recording lasts 36 s and its first window starts after the 10 s
    // transient. 400 maps at 10 fps run past the end; 250 fit.
    ok(
        d,
        &[
            "gen-clips",
            "--count",
            "1",
            "--frames",
            "400",
            "--size",
            "8",
            "--motion",
            "static",
            "--out",
            "long",
        ],
    );
    ok(
        d,
        &[
            "gen-clips",
            "--count",
            "1",
            "--frames",
            "250",
            "--size",
            "8",
            "--motion",
            "static",
            "--out",
            "short",
        ],
    );
    let base = [
        "--config",
        "quick.cfg",
        "replay",
        "--model",
        "tcn/tcn.ckpt",
        "--ppg",
    ];
    let run = |ppg: &str, maps: &str| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend([ppg, "--maps", maps, "--out", "alerts.jsonl"]);
        code(d, &args)
    };
    assert_eq!(run("ppg/rec_000.csv", "long/clip_000/truth"), 3);
    assert_eq!(run("ppg/missing.csv", "short/clip_000/truth"), 2);
    write(&d.join("jitter.csv"), "t_ms,value\n0,0.1\n1,0.2\n3,0.3\n");
    assert_eq!(run("jitter.csv", "short/clip_000/truth"), 2);
    std::fs::write(d.join("bad.ckpt"), b"NOPE").unwrap();
    let out = vigil(
        d,
        &[
            "replay",
            "--model",
            "bad.ckpt",
            "--ppg",
            "ppg/rec_000.csv",
            "--maps",
            "short/clip_000/truth",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run("ppg/rec_000.csv", "short/clip_000/truth"), 0);
    let log = std::fs::read_to_string(d.join("alerts.jsonl")).unwrap();
    assert!(log
        .lines()
        .all(|l| l.starts_with("{\"t_ms\":") && l.contains("\"scene\":\"static\"")));
}

#[test]
fn calibrate_reports_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut log = String::from("t_ms,score,gradient,alert_expected\n");
    for i in 0..40 {
        let score = (i % 10) as f64 / 10.0;
        let gradient = ((i * 7) % 10) as f64 / 10.0;
        let alert = score < 0.5 && gradient > 0.3;
        log.push_str(&format!(
            "{},{score},{gradient},{}\n",
            i * 5000,
            u8::from(alert)
        ));
    }
    write(&d.join("log.csv"), &log);
    let out = ok(d, &["calibrate", "--log", "log.csv"]);
    assert!(out.contains("fusion.theta = 0.3"), "{out}");
    assert!(out.contains("fusion.attention_high_min = 0.5"), "{out}");
    assert!(out.contains("accuracy 1.0000"), "{out}");
    ok(d, &["calibrate", "--log", "log.csv", "--out", "fusion.cfg"]);
    // The report is itself a loadable config fragment.
    ok(
        d,
        &[
            "--config",
            "fusion.cfg",
            "gen-ppg",
            "--per-class",
            "1",
            "--windows-per-recording",
            "1",
            "--out",
            "p",
        ],
    );
    assert_eq!(code(d, &["calibrate", "--log", "missing.csv"]), 2);
}
