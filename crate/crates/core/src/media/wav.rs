use std::path::Path;

use crate::Real;

use super::MediaError;

/// Multichannel PCM audio with samples normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip<T> {
    sample_rate: u32,
    channels: Vec<Vec<T>>,
}

impl<T: Real> AudioClip<T> {
    pub fn new(sample_rate: u32, channels: Vec<Vec<T>>) -> Result<Self, MediaError> {
        if sample_rate == 0 {
            return Err(MediaError::InvalidAudio("sample rate must be positive".into()));
        }
        if channels.is_empty() {
            return Err(MediaError::InvalidAudio("clip has no channels".into()));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(MediaError::InvalidAudio("channels differ in length".into()));
        }
        Ok(Self { sample_rate, channels })
    }

    pub fn mono(sample_rate: u32, samples: Vec<T>) -> Result<Self, MediaError> {
        Self::new(sample_rate, vec![samples])
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, index: usize) -> &[T] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<T>] {
        &self.channels
    }
}

fn malformed(path: &Path, reason: impl ToString) -> MediaError {
    MediaError::MalformedWav {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn unsupported(path: &Path, reason: impl ToString) -> MediaError {
    MediaError::UnsupportedCodec {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn map_hound(path: &Path, err: hound::Error) -> MediaError {
    match err {
        hound::Error::IoError(e) => MediaError::io(path, e),
        hound::Error::FormatError(msg) => malformed(path, msg),
        hound::Error::UnfinishedSample => malformed(path, "data chunk ends inside a sample"),
        hound::Error::TooWide | hound::Error::Unsupported | hound::Error::InvalidSampleFormat => unsupported(path, err),
    }
}

/// Reads a RIFF/WAVE file holding 16-bit integer or 32-bit float PCM.
///
/// 16-bit samples are scaled by 1/32768, so full-scale negative maps to exactly -1.
pub fn read_wav<T: Real>(path: impl AsRef<Path>) -> Result<AudioClip<T>, MediaError> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    let n_ch = spec.channels as usize;
    if n_ch == 0 {
        return Err(malformed(path, "zero channels"));
    }
    let interleaved: Vec<T> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => {
            let scale = T::lit(1.0 / 32768.0);
            reader
                .samples::<i16>()
                .map(|s| s.map(|v| T::lit(v as f64) * scale))
                .collect::<Result<_, _>>()
                .map_err(|e| map_hound(path, e))?
        }
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| T::lit(v as f64)))
            .collect::<Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (format, bits) => {
            return Err(unsupported(path, format!("{bits}-bit {format:?} samples")));
        }
    };
    if interleaved.len() % n_ch != 0 {
        return Err(malformed(path, "sample count is not a multiple of the channel count"));
    }
    let frames = interleaved.len() / n_ch;
    let mut channels = vec![Vec::with_capacity(frames); n_ch];
    for (i, s) in interleaved.into_iter().enumerate() {
        channels[i % n_ch].push(s);
    }
    AudioClip::new(spec.sample_rate, channels)
}

/// Writes 16-bit PCM, rounding `x * 32768` and saturating to the i16 range.
pub fn write_wav_pcm16<T: Real>(path: impl AsRef<Path>, clip: &AudioClip<T>) -> Result<(), MediaError> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: clip.channel_count() as u16,
        sample_rate: clip.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    for i in 0..clip.len() {
        for ch in clip.channels() {
            let v = (ch[i].to_f64_lossy() * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
            w.write_sample(v).map_err(|e| map_hound(path, e))?;
        }
    }
    w.finalize().map_err(|e| map_hound(path, e))
}

pub fn write_wav_f32<T: Real>(path: impl AsRef<Path>, clip: &AudioClip<T>) -> Result<(), MediaError> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: clip.channel_count() as u16,
        sample_rate: clip.sample_rate(),
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    for i in 0..clip.len() {
        for ch in clip.channels() {
            w.write_sample(ch[i].to_f64_lossy() as f32).map_err(|e| map_hound(path, e))?;
        }
    }
    w.finalize().map_err(|e| map_hound(path, e))
}
