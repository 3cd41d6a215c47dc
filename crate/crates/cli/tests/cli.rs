use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use oavqa::media::{write_wav_f32, write_yuv, AudioClip, DatasetManifest, ManifestEntry, VideoFrame};
use oavqa::models::{AudioModel, Model, VideoModel};
use oavqa::store::{write_score_file, ScoreRecord};

fn oavqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oavqa")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Cheap deterministic pseudo-noise in [-1, 1].
fn hash_noise(i: usize, salt: usize) -> f64 {
    let x = ((i * 2_654_435_761 + salt * 40_503) % 1_000_003) as f64;
    (x / 1_000_003.0) * 2.0 - 1.0
}

fn frame(w: usize, h: usize, salt: usize, amp: f64) -> VideoFrame {
    let y = (0..w * h)
        .map(|i| (128.0 + 50.0 * ((i % w) as f64 / 7.0).sin() + amp * hash_noise(i, salt)).clamp(0.0, 255.0) as u8)
        .collect();
    let c = (0..w * h / 4).map(|i| (128.0 + 20.0 * (i as f64 / 5.0).cos()) as u8).collect::<Vec<u8>>();
    VideoFrame::new(w, h, y, c.clone(), c).unwrap()
}

fn tone(n: usize, salt: usize, noise: f64) -> AudioClip<f64> {
    let x = (0..n)
        .map(|i| 0.3 * (i as f64 * 0.07).sin() * (0.6 + 0.4 * (i as f64 * 0.0015).sin()) + noise * hash_noise(i, salt))
        .collect();
    AudioClip::mono(16_000, x).unwrap()
}

fn media_dataset(dir: &Path, entries: usize) -> PathBuf {
    write_yuv(dir.join("ref.yuv"), &[frame(32, 16, 0, 0.0)]).unwrap();
    write_wav_f32(dir.join("ref.wav"), &tone(4000, 0, 0.0)).unwrap();
    let mut rows = Vec::new();
    for k in 0..entries {
        let id = format!("e{k}");
        write_yuv(dir.join(format!("{id}.yuv")), &[frame(32, 16, k + 1, 4.0 * (k + 1) as f64)]).unwrap();
        write_wav_f32(dir.join(format!("{id}.wav")), &tone(4000, k + 1, 0.02 * (k + 1) as f64)).unwrap();
        rows.push(ManifestEntry {
            id: id.clone(),
            content_id: format!("c{k}"),
            ref_video: "ref.yuv".into(),
            dist_video: format!("{id}.yuv").into(),
            ref_audio: "ref.wav".into(),
            dist_audio: format!("{id}.wav").into(),
            distortion_label: "noise".into(),
            mos: Some(80.0 - 10.0 * k as f64),
        });
    }
    let path = dir.join("manifest.csv");
    DatasetManifest::new(rows).unwrap().write_csv(&path).unwrap();
    path
}

/// Manifest with bogus media plus a score store holding every registry model.
fn scored_dataset(dir: &Path, contents: usize, per_content: usize) -> (PathBuf, PathBuf) {
    let mut rows = Vec::new();
    for c in 0..contents {
        for d in 0..per_content {
            let id = format!("c{c}_d{d}");
            rows.push(ManifestEntry {
                id: id.clone(),
                content_id: format!("c{c}"),
                ref_video: "missing.yuv".into(),
                dist_video: "missing.yuv".into(),
                ref_audio: "missing.wav".into(),
                dist_audio: "missing.wav".into(),
                distortion_label: format!("d{d}"),
                mos: Some(20.0 + ((c * 13 + d * 29) % 60) as f64),
            });
        }
    }
    let manifest = DatasetManifest::new(rows).unwrap();
    let path = dir.join("manifest.csv");
    manifest.write_csv(&path).unwrap();
    let store = dir.join("scores");
    std::fs::create_dir_all(&store).unwrap();
    let models = VideoModel::ALL
        .iter()
        .map(|&m| Model::Video(m))
        .chain(AudioModel::ALL.iter().map(|&m| Model::Audio(m)));
    for (k, model) in models.enumerate() {
        let recs: Vec<ScoreRecord<f64>> = manifest
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let features: Vec<f64> = (0..model.feature_arity()).map(|f| 0.5 + 0.5 * hash_noise(i * 7 + f, k)).collect();
                ScoreRecord {
                    id: e.id.clone(),
                    model: model.id().into(),
                    score: (e.mos.unwrap() / 100.0 + 0.1 * hash_noise(i, k + 50)).clamp(0.0, 1.0),
                    features,
                }
            })
            .collect();
        write_score_file(store.join(format!("{}.csv", model.id())), &recs).unwrap();
    }
    (path, store)
}

#[test]
fn metrics_two_entries_then_idempotent_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = media_dataset(dir.path(), 2);
    let out = dir.path().join("scores");
    let args = [
        "metrics", "--manifest", s(&manifest), "--out", s(&out), "--video-models", "ssim", "--audio-models", "snr",
        "--width", "32", "--height", "16", "--jobs", "2",
    ];
    let first = oavqa(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    for f in ["ssim.csv", "snr.csv"] {
        let text = std::fs::read_to_string(out.join(f)).unwrap();
        assert_eq!(text.lines().count(), 3, "{f}: {text}");
    }
    assert!(first.stdout.is_empty());
    for line in String::from_utf8_lossy(&first.stderr).lines() {
        serde_json::from_str::<serde_json::Value>(line).expect("stderr is JSON lines");
    }

    let again = oavqa(&args);
    assert_eq!(again.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&again.stderr);
    assert_eq!(stderr.matches("\"status\":\"skipped\"").count(), 4, "{stderr}");
    assert!(stderr.contains("\"computed\":0"));
}

#[test]
fn metrics_missing_file_flags_entry_and_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = media_dataset(dir.path(), 2);
    std::fs::remove_file(dir.path().join("e1.wav")).unwrap();
    let out = dir.path().join("scores");
    let run = oavqa(&["metrics", "--manifest", s(&manifest), "--out", s(&out), "--audio-models", "snr", "--video-models", "ssim", "--width", "32", "--height", "16"]);
    assert_eq!(run.status.code(), Some(3));
    let failures = std::fs::read_to_string(out.join("failures.csv")).unwrap();
    assert!(failures.contains("e1,snr"), "{failures}");
    assert_eq!(std::fs::read_to_string(out.join("snr.csv")).unwrap().lines().count(), 2);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = media_dataset(dir.path(), 2);
    let out = dir.path().join("scores");
    let unknown = oavqa(&["metrics", "--manifest", s(&manifest), "--out", s(&out), "--video-models", "psnr-hvs"]);
    assert_eq!(unknown.status.code(), Some(2));
    let no_dims = oavqa(&["metrics", "--manifest", s(&manifest), "--out", s(&out), "--video-models", "ssim", "--audio-models", "snr"]);
    assert_eq!(no_dims.status.code(), Some(2));
    let (m, store) = scored_dataset(dir.path(), 5, 2);
    let bad_gamma = oavqa(&["train", "--manifest", s(&m), "--scores", s(&store), "--out", s(dir.path()), "--gamma", "-1"]);
    assert_eq!(bad_gamma.status.code(), Some(2));
}

#[test]
fn mos_writes_sequence_scores() {
    let dir = tempfile::tempdir().unwrap();
    let ratings = dir.path().join("ratings.csv");
    std::fs::write(&ratings, "subject_id,sequence_id,rating\na,x,4\na,y,6\nb,x,2\nb,y,8\n").unwrap();
    let out = dir.path().join("mos.csv");
    let run = oavqa(&["mos", "--ratings", s(&ratings), "--out", s(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "sequence_id,mos");
    let x: f64 = rows[1].strip_prefix("x,").unwrap().parse().unwrap();
    assert!((x - 38.21).abs() < 5e-3);

    std::fs::write(&ratings, "subject_id,sequence_id,rating\na,x,4\na,y,6\nb,x,5\nb,y,5\n").unwrap();
    let constant = oavqa(&["mos", "--ratings", s(&ratings), "--out", s(&out)]);
    assert_eq!(constant.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&constant.stderr).contains("`b`"));
}

#[test]
fn train_weighted_product_writes_model_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, store) = scored_dataset(dir.path(), 10, 3);
    let out = dir.path().join("models");
    let run = oavqa(&[
        "train", "--manifest", s(&manifest), "--scores", s(&store), "--out", s(&out), "--method", "wp", "--video-models", "vmaf",
        "--audio-models", "stoi", "--seed", "3",
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let files: Vec<String> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(files.len(), 2, "{files:?}");
    let model: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("wp_vmaf_stoi.json")).unwrap()).unwrap();
    let w = model["w"].as_f64().unwrap();
    assert!(((w * 20.0).round() - w * 20.0).abs() < 1e-9, "w = {w}");
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("training_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["gamma"].as_f64(), Some(0.05));
    assert_eq!(summary["c"].as_f64(), Some(1024.0));
    assert_eq!(summary["models"].as_array().unwrap().len(), 1);
}

#[test]
fn train_feature_svr_has_seven_named_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, store) = scored_dataset(dir.path(), 10, 3);
    let out = dir.path().join("models");
    let run = oavqa(&[
        "train", "--manifest", s(&manifest), "--scores", s(&store), "--out", s(&out), "--method", "svr-feat", "--video-models", "vifp",
        "--audio-models", "visqol",
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let model: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("svr-feat_vifp_visqol.json")).unwrap()).unwrap();
    let schema = model["schema"].as_array().unwrap();
    assert_eq!(schema.len(), 7);
    assert!(schema.iter().all(|n| n.as_str().is_some_and(|n| !n.is_empty())));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("training_summary.json")).unwrap()).unwrap();
    assert!(summary["models"][0]["report"]["svr"]["iterations"].as_u64().is_some());
}

#[test]
fn train_missing_scores_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, store) = scored_dataset(dir.path(), 10, 3);
    let text = std::fs::read_to_string(store.join("stoi.csv")).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("c0_") && !l.starts_with("c1_") && !l.starts_with("c2_")).collect();
    std::fs::write(store.join("stoi.csv"), kept.join("\n")).unwrap();
    let run = oavqa(&[
        "train", "--manifest", s(&manifest), "--scores", s(&store), "--out", s(dir.path()), "--video-models", "ssim", "--audio-models", "stoi",
    ]);
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn benchmark_full_registry_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, store) = scored_dataset(dir.path(), 10, 3);
    let out = dir.path().join("bench");
    let run = oavqa(&["benchmark", "--manifest", s(&manifest), "--scores", s(&store), "--out", s(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(out.join("benchmark.csv")).unwrap();
    let count = |prefix: &str| csv.lines().filter(|l| l.starts_with(prefix)).count();
    assert_eq!(count("fusion,wp,"), 54);
    assert_eq!(count("fusion,svr-score,") + count("fusion,svr-feat,"), 108);
    assert_eq!(count("single,"), 15);
    let table = std::fs::read_to_string(out.join("benchmark.txt")).unwrap();
    assert!(table.contains("[wp] SRCC") && table.contains("[single-mode]"));

    let single = dir.path().join("single");
    let run = oavqa(&[
        "benchmark", "--manifest", s(&manifest), "--scores", s(&store), "--out", s(&single), "--single-mode-only", "--repeats", "3",
    ]);
    assert!(run.status.success());
    let csv = std::fs::read_to_string(single.join("benchmark.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
}
