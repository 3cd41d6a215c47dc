//! Seeded synthetic omnidirectional dataset written to a temp directory.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use oavqa::media::{write_wav_f32, write_yuv, AudioClip, DatasetManifest, ManifestEntry, VideoFrame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const SAMPLE_RATE: u32 = 16_000;

/// Distortion levels applied to one entry.
#[derive(Debug, Clone, Copy)]
pub struct Levels {
    pub luma_sigma: f64,
    pub chroma_sigma: f64,
    pub audio_snr_db: f64,
}

impl Levels {
    /// Planted opinion score on 0-100 that depends on all three levels.
    pub fn planted_mos(&self) -> f64 {
        let ql = 1.0 / (1.0 + self.luma_sigma / 4.0);
        let qc = 1.0 / (1.0 + self.chroma_sigma / 4.0);
        let qa = 0.2 + 0.8 * (self.audio_snr_db / 30.0).clamp(0.0, 1.0);
        100.0 * ql.powf(0.45) * qc.powf(0.25) * qa.powf(0.3)
    }
}

pub struct Synthetic {
    pub dir: tempfile::TempDir,
    pub manifest_path: PathBuf,
    pub manifest: DatasetManifest,
    pub levels: Vec<Levels>,
}

pub fn reference_frames(width: usize, height: usize, frames: usize, rng: &mut ChaCha8Rng) -> Vec<VideoFrame> {
    let (fx, fy): (f64, f64) = (rng.random_range(1.0..4.0), rng.random_range(1.0..3.0));
    let (px, py): (f64, f64) = (rng.random_range(0.0..6.28), rng.random_range(0.0..6.28));
    let (cu, cv): (f64, f64) = (rng.random_range(0.5..2.5), rng.random_range(0.5..2.5));
    let base = rng.random_range(90.0..150.0);
    (0..frames)
        .map(|t| {
            let shift = t as f64 * 0.15;
            let y = (0..height)
                .flat_map(|r| {
                    (0..width).map(move |c| {
                        let x = c as f64 / width as f64 * std::f64::consts::TAU;
                        let yy = r as f64 / height as f64 * std::f64::consts::PI;
                        let v = base + 45.0 * (fx * x + px + shift).sin() * (fy * yy + py).cos() + 20.0 * (3.0 * x - yy).cos();
                        v.round().clamp(16.0, 235.0) as u8
                    })
                })
                .collect();
            let (cw, ch) = (width / 2, height / 2);
            let chroma = |f: f64, phase: f64| -> Vec<u8> {
                (0..ch)
                    .flat_map(|r| {
                        (0..cw).map(move |c| {
                            let x = c as f64 / cw as f64 * std::f64::consts::TAU;
                            let yy = r as f64 / ch as f64 * std::f64::consts::PI;
                            (128.0 + 40.0 * (f * x + phase + shift).cos() * yy.sin()).round() as u8
                        })
                    })
                    .collect()
            };
            VideoFrame::new(width, height, y, chroma(cu, px), chroma(cv, py)).unwrap()
        })
        .collect()
}

pub fn add_noise(frames: &[VideoFrame], luma: f64, chroma: f64, rng: &mut ChaCha8Rng) -> Vec<VideoFrame> {
    let noisy = |plane: &[u8], sigma: f64, rng: &mut ChaCha8Rng| -> Vec<u8> {
        if sigma == 0.0 {
            return plane.to_vec();
        }
        let n = Normal::new(0.0, sigma).unwrap();
        plane
            .iter()
            .map(|&p| (p as f64 + n.sample(rng)).round().clamp(0.0, 255.0) as u8)
            .collect()
    };
    frames
        .iter()
        .map(|f| {
            let y = noisy(f.y_plane(), luma, rng);
            let u = noisy(f.u_plane(), chroma, rng);
            let v = noisy(f.v_plane(), chroma, rng);
            VideoFrame::new(f.width(), f.height(), y, u, v).unwrap()
        })
        .collect()
}

/// Amplitude-modulated harmonic tone without silent stretches.
pub fn reference_audio(seconds: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let f0 = rng.random_range(110.0..220.0);
    let fm = rng.random_range(3.0..6.0);
    let n = (seconds * SAMPLE_RATE as f64) as usize;
    (0..n)
        .map(|i| {
            let t = i as f64 / SAMPLE_RATE as f64;
            let env = 0.6 + 0.4 * (std::f64::consts::TAU * fm * t).sin();
            let tone: f64 = (1..=16)
                .map(|k| (std::f64::consts::TAU * f0 * k as f64 * t + k as f64).sin() / k as f64)
                .sum();
            0.15 * env * tone
        })
        .collect()
}

pub fn add_audio_noise(signal: &[f64], snr_db: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let rms = (signal.iter().map(|s| s * s).sum::<f64>() / signal.len() as f64).sqrt();
    let n = Normal::new(0.0, rms * 10f64.powf(-snr_db / 20.0)).unwrap();
    signal.iter().map(|s| s + n.sample(rng)).collect()
}

fn entry(dir: &Path, id: &str, content: &str, label: &str, mos: f64) -> ManifestEntry {
    ManifestEntry {
        id: id.to_string(),
        content_id: content.to_string(),
        ref_video: dir.join(format!("{content}_ref.yuv")),
        dist_video: dir.join(format!("{id}.yuv")),
        ref_audio: dir.join(format!("{content}_ref.wav")),
        dist_audio: dir.join(format!("{id}.wav")),
        distortion_label: label.to_string(),
        mos: Some(mos),
    }
}

/// `contents x distortions` entries with independent, seeded luma, chroma and audio noise levels.
pub fn synthetic_dataset(
    contents: usize,
    distortions: usize,
    (width, height): (usize, usize),
    frames: usize,
    audio_seconds: f64,
    seed: u64,
) -> Synthetic {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let mut levels = Vec::new();
    for c in 0..contents {
        let content = format!("c{c:02}");
        let ref_frames = reference_frames(width, height, frames, &mut rng);
        write_yuv(dir.path().join(format!("{content}_ref.yuv")), &ref_frames).unwrap();
        let ref_audio = reference_audio(audio_seconds, &mut rng);
        let clip = AudioClip::mono(SAMPLE_RATE, ref_audio.clone()).unwrap();
        write_wav_f32(dir.path().join(format!("{content}_ref.wav")), &clip).unwrap();
        for d in 0..distortions {
            let lv = Levels {
                luma_sigma: rng.random_range(0.5..14.0),
                chroma_sigma: rng.random_range(0.5..14.0),
                audio_snr_db: rng.random_range(0.0..30.0),
            };
            let id = format!("{content}_d{d}");
            let dist = add_noise(&ref_frames, lv.luma_sigma, lv.chroma_sigma, &mut rng);
            write_yuv(dir.path().join(format!("{id}.yuv")), &dist).unwrap();
            let noisy = add_audio_noise(&ref_audio, lv.audio_snr_db, &mut rng);
            write_wav_f32(dir.path().join(format!("{id}.wav")), &AudioClip::mono(SAMPLE_RATE, noisy).unwrap()).unwrap();
            entries.push(entry(dir.path(), &id, &content, &format!("d{d}"), lv.planted_mos()));
            levels.push(lv);
        }
    }
    let manifest = DatasetManifest::new(entries).unwrap();
    let manifest_path = dir.path().join("manifest.csv");
    manifest.write_csv(&manifest_path).unwrap();
    Synthetic {
        dir,
        manifest_path,
        manifest,
        levels,
    }
}
