//! `vigil`: command-line harness for the driver-attention pipeline.
//!
//! Exit codes: 0 success, 2 input or output failure, 3 stream alignment
//! failure, 4 configuration or usage error, 1 anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vigil_core::config::RunConfig;
use vigil_core::dsp::{
    apply_filter_bank, build_filter_bank_with_order, decimate_with_order, design_fir,
};
use vigil_core::fusion::{calibrate, parse_labeled_log, write_alert_log};
use vigil_core::harness::{
    eval_saliency, predict_clip_dir, replay_files, synthetic_ppg_recordings, train_ssfcn_dirs,
    train_tcn, windows_from_manifest, write_synthetic_clips, write_synthetic_ppg, PpgDatasetSpec,
};
use vigil_core::io::{load_ppg_csv, write_loss_csv, write_taps_csv};
use vigil_core::saliency::MetricRow;
use vigil_core::seed::derive_seed;
use vigil_core::synth::{gen_synthetic_clips_with, BlobMotion, ClipSpec};
use vigil_core::{ssfcn, tcn, Error};

#[derive(Parser, Debug)]
#[command(
    name = "vigil",
    version,
    about = "PPG attention scoring, video saliency and alert fusion"
)]
struct Cli {
    /// Run configuration (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Motion {
    Static,
    Drift,
    Jump,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthetic labeled PPG recordings plus a `labels.csv` manifest.
    GenPpg {
        /// Recordings per class.
        #[arg(long, default_value_t = 10)]
        per_class: usize,
        /// Windows each recording yields after transient trimming.
        #[arg(long, default_value_t = 20)]
        windows_per_recording: usize,
    },
    /// Synthetic clip directories (frames, truth maps, fixations).
    GenClips {
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        frames: usize,
        /// Frame height and width in pixels.
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1)]
        flatness: u32,
        #[arg(long, value_enum, default_value_t = Motion::Drift)]
        motion: Motion,
    },
    /// Decimates and filter-banks a PPG CSV; writes `hyper.csv` and taps.
    Filter {
        #[arg(long)]
        ppg: PathBuf,
    },
    /// Trains the attention classifier on a labeled manifest.
    TrainTcn {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Trains the saliency network on a directory of clip directories.
    TrainSsfcn {
        #[arg(long)]
        clips: PathBuf,
    },
    /// Scores predicted maps against truth maps and fixations.
    EvalSaliency {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        fixations: PathBuf,
    },
    /// Runs the full pipeline over a PPG recording and a map sequence.
    Replay {
        /// Attention classifier checkpoint.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        ppg: PathBuf,
        /// Directory of `frame_*.pgm` maps (with optional `.f64` sidecars).
        #[arg(long)]
        maps: PathBuf,
    },
    /// Grid-searches the fusion thresholds on a labeled decision log.
    Calibrate {
        /// CSV with header `t_ms,score,gradient,alert_expected`.
        #[arg(long)]
        log: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Ingest { .. } | Error::Io { .. } | Error::Checkpoint(_) => 2,
        Error::Alignment(_) => 3,
        Error::Config { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vigil: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_path(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn create_dir(path: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::GenPpg {
            per_class,
            windows_per_recording,
        } => {
            let spec = PpgDatasetSpec {
                windows_per_class: per_class * windows_per_recording,
                windows_per_recording: *windows_per_recording,
                ..PpgDatasetSpec::default()
            };
            let recordings =
                synthetic_ppg_recordings(&spec, &cfg.dsp, derive_seed(cfg.seed, "gen-ppg"))?;
            let manifest = write_synthetic_ppg(&out_path(&cli, "ppg"), &recordings)?;
            println!(
                "wrote {} recordings, manifest {}",
                recordings.len(),
                manifest.display()
            );
        }
        Command::GenClips {
            count,
            frames,
            size,
            sigma,
            flatness,
            motion,
        } => {
            let spec = ClipSpec {
                t_len: *frames,
                height: *size,
                width: *size,
                sigma: *sigma,
                flatness: *flatness,
                motion: match motion {
                    Motion::Static => BlobMotion::Static,
                    Motion::Drift => BlobMotion::Drift,
                    Motion::Jump => BlobMotion::Jump,
                },
                frame_rate_fps: cfg.map_fps,
                ..ClipSpec::default()
            };
            let clips =
                gen_synthetic_clips_with(*count, derive_seed(cfg.seed, "gen-clips"), &spec)?;
            let dirs = write_synthetic_clips(&out_path(&cli, "clips"), &clips)?;
            println!("wrote {} clip directories", dirs.len());
        }
        Command::Filter { ppg } => {
            let out = out_path(&cli, "filtered");
            create_dir(&out.join("taps"))?;
            let series = load_ppg_csv(ppg)?;
            let decimated =
                decimate_with_order(&series, cfg.dsp.decimate_factor, cfg.dsp.fir_order)?;
            let fs = decimated.sample_rate_hz();
            let bank = build_filter_bank_with_order(fs, cfg.dsp.fir_order)?;
            for (i, ch) in bank.channels.iter().enumerate() {
                write_taps_csv(
                    &out.join("taps").join(format!("ch_{:02}.csv", i + 1)),
                    &design_fir(ch, fs)?,
                )?;
            }
            let mut hyper = apply_filter_bank(&decimated, &bank)?;
            if cfg.dsp.trim_transient {
                hyper = hyper.trim(hyper.transient)?;
            }
            let mut s = String::from("t_ms");
            for i in 0..hyper.n_channels() {
                let _ = write!(s, ",ch{:02}", i + 1);
            }
            s.push('\n');
            for j in 0..hyper.len() {
                let _ = write!(s, "{}", hyper.start_time_ms + hyper.offset_ms(j));
                for row in &hyper.rows {
                    let _ = write!(s, ",{}", row[j]);
                }
                s.push('\n');
            }
            write_file(&out.join("hyper.csv"), &s)?;
            println!(
                "{} channels x {} samples at {fs} Hz",
                hyper.n_channels(),
                hyper.len()
            );
        }
        Command::TrainTcn { manifest } => {
            let out = out_path(&cli, "tcn");
            create_dir(&out)?;
            let windows = windows_from_manifest(manifest, &cfg.dsp)?;
            let run = train_tcn(&cfg, &windows)?;
            tcn::save_checkpoint(&run.params, &out.join("tcn.ckpt"))?;
            write_loss_csv(&out.join("loss.csv"), &run.history)?;
            println!(
                "train {} windows, accuracy {:.4}; test {} windows, accuracy {:.4}",
                run.n_train, run.train_accuracy, run.n_test, run.test_accuracy
            );
        }
        Command::TrainSsfcn { clips } => {
            let out = out_path(&cli, "ssfcn");
            create_dir(&out)?;
            let (params, history) = train_ssfcn_dirs(&cfg, clips)?;
            ssfcn::save_checkpoint(&params, &out.join("ssfcn.ckpt"))?;
            write_loss_csv(&out.join("loss.csv"), &history)?;
            let mut dirs: Vec<PathBuf> = std::fs::read_dir(clips)
                .map_err(|source| Error::Io {
                    path: clips.clone(),
                    source,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.join("frames").is_dir())
                .collect();
            dirs.sort();
            for d in &dirs {
                let name = d.file_name().map(PathBuf::from).unwrap_or_default();
                predict_clip_dir(&params, &cfg, d, &out.join("pred").join(name))?;
            }
            println!(
                "final loss {:.6}",
                history.last().copied().unwrap_or(f64::NAN)
            );
        }
        Command::EvalSaliency {
            pred,
            truth,
            fixations,
        } => {
            let rows = eval_saliency(pred, truth, fixations)?;
            MetricRow::write_csv(&out_path(&cli, "metrics.csv"), &rows)?;
            println!("scored {} maps", rows.len());
        }
        Command::Replay { model, ppg, maps } => {
            let params = tcn::load_checkpoint(model)?;
            let result = replay_files(&cfg, &params, ppg, maps)?;
            write_alert_log(&out_path(&cli, "alerts.jsonl"), &result.decisions)?;
            println!(
                "{} decisions, {} alert events",
                result.decisions.len(),
                result.events.len()
            );
        }
        Command::Calibrate { log } => {
            let text = std::fs::read_to_string(log).map_err(|source| Error::Io {
                path: log.clone(),
                source,
            })?;
            let windows = parse_labeled_log(&text, log)?;
            let best = calibrate(&windows, &cfg.fusion)?;
            let report = format!(
                "fusion.theta = {:.2}\nfusion.attention_high_min = {:.2}\n# accuracy {:.4} over {} windows\n",
                best.theta,
                best.attention_high_min,
                best.accuracy,
                windows.len()
            );
            match &cli.out {
                Some(p) => write_file(p, &report)?,
                None => print!("{report}"),
            }
        }
    }
    Ok(())
}
