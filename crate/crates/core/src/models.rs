//! Registry of the single-mode quality models known to the toolkit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown quality model `{0}`")]
pub struct UnknownModel(pub String);

/// Full-reference video quality models, in report row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VideoModel {
    Vmaf,
    WsPsnr,
    SPsnr,
    CppPsnr,
    Ssim,
    MsSsim,
    Vifp,
    Fsim,
    Gmsd,
}

/// Full-reference audio quality models, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AudioModel {
    Peaq,
    Stoi,
    Visqol,
    Llr,
    Snr,
    SegSnr,
}

/// Either kind of single-mode model; used where video and audio scores share plumbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Model {
    Video(VideoModel),
    Audio(AudioModel),
}

impl VideoModel {
    pub const ALL: [VideoModel; 9] = [
        VideoModel::Vmaf,
        VideoModel::WsPsnr,
        VideoModel::SPsnr,
        VideoModel::CppPsnr,
        VideoModel::Ssim,
        VideoModel::MsSsim,
        VideoModel::Vifp,
        VideoModel::Fsim,
        VideoModel::Gmsd,
    ];

    /// Identifier used on the command line and in score-store file names.
    pub fn id(self) -> &'static str {
        match self {
            VideoModel::Vmaf => "vmaf",
            VideoModel::WsPsnr => "ws-psnr",
            VideoModel::SPsnr => "s-psnr",
            VideoModel::CppPsnr => "cpp-psnr",
            VideoModel::Ssim => "ssim",
            VideoModel::MsSsim => "ms-ssim",
            VideoModel::Vifp => "vifp",
            VideoModel::Fsim => "fsim",
            VideoModel::Gmsd => "gmsd",
        }
    }

    /// Name as printed in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            VideoModel::Vmaf => "VMAF",
            VideoModel::WsPsnr => "WS-PSNR",
            VideoModel::SPsnr => "S-PSNR",
            VideoModel::CppPsnr => "CPP-PSNR",
            VideoModel::Ssim => "SSIM",
            VideoModel::MsSsim => "MS-SSIM",
            VideoModel::Vifp => "VIFP",
            VideoModel::Fsim => "FSIM",
            VideoModel::Gmsd => "GMSD",
        }
    }

    /// Names of the decomposed feature dimensions, in vector order.
    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            VideoModel::Vmaf => &["vif_scale0", "vif_scale1", "vif_scale2", "vif_scale3", "adm", "motion"],
            VideoModel::WsPsnr | VideoModel::SPsnr | VideoModel::CppPsnr => &["psnr_y", "psnr_u", "psnr_v"],
            VideoModel::Ssim => &["luminance", "contrast_structure"],
            VideoModel::MsSsim => &["luminance", "cs_scale1", "cs_scale2", "cs_scale3", "cs_scale4", "cs_scale5"],
            VideoModel::Vifp => &["vif_scale1", "vif_scale2", "vif_scale3", "vif_scale4"],
            VideoModel::Fsim => &["phase_congruency", "gradient_magnitude", "chrominance"],
            VideoModel::Gmsd => &["gms_mean", "gms_std"],
        }
    }

    pub fn feature_arity(self) -> usize {
        self.feature_names().len()
    }

    /// Whether a lower raw score means better quality.
    pub fn lower_is_better(self) -> bool {
        matches!(self, VideoModel::Gmsd)
    }

    /// Models computed in-process; the rest arrive through external score files.
    pub fn is_native(self) -> bool {
        !matches!(self, VideoModel::Vmaf)
    }
}

impl AudioModel {
    pub const ALL: [AudioModel; 6] = [
        AudioModel::Peaq,
        AudioModel::Stoi,
        AudioModel::Visqol,
        AudioModel::Llr,
        AudioModel::Snr,
        AudioModel::SegSnr,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AudioModel::Peaq => "peaq",
            AudioModel::Stoi => "stoi",
            AudioModel::Visqol => "visqol",
            AudioModel::Llr => "llr",
            AudioModel::Snr => "snr",
            AudioModel::SegSnr => "segsnr",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            AudioModel::Peaq => "PEAQ",
            AudioModel::Stoi => "STOI",
            AudioModel::Visqol => "VISQOL",
            AudioModel::Llr => "LLR",
            AudioModel::Snr => "SNR",
            AudioModel::SegSnr => "segSNR",
        }
    }

    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            AudioModel::Peaq => &[
                "bandwidth_ref",
                "bandwidth_test",
                "total_nmr",
                "win_mod_diff1",
                "adb",
                "ehs",
                "avg_mod_diff1",
                "avg_mod_diff2",
                "rms_noise_loud",
                "mfpd",
                "rel_dist_frames",
            ],
            AudioModel::Visqol => &["narrowband", "wideband", "fullband"],
            AudioModel::Stoi => &["stoi"],
            AudioModel::Llr => &["llr"],
            AudioModel::Snr => &["snr"],
            AudioModel::SegSnr => &["segsnr"],
        }
    }

    pub fn feature_arity(self) -> usize {
        self.feature_names().len()
    }

    pub fn lower_is_better(self) -> bool {
        matches!(self, AudioModel::Llr)
    }

    pub fn is_native(self) -> bool {
        !matches!(self, AudioModel::Peaq | AudioModel::Visqol)
    }
}

impl Model {
    pub fn id(self) -> &'static str {
        match self {
            Model::Video(m) => m.id(),
            Model::Audio(m) => m.id(),
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Model::Video(m) => m.display_name(),
            Model::Audio(m) => m.display_name(),
        }
    }

    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            Model::Video(m) => m.feature_names(),
            Model::Audio(m) => m.feature_names(),
        }
    }

    pub fn feature_arity(self) -> usize {
        self.feature_names().len()
    }

    pub fn lower_is_better(self) -> bool {
        match self {
            Model::Video(m) => m.lower_is_better(),
            Model::Audio(m) => m.lower_is_better(),
        }
    }

    pub fn is_native(self) -> bool {
        match self {
            Model::Video(m) => m.is_native(),
            Model::Audio(m) => m.is_native(),
        }
    }
}

fn canonical(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('_', "-")
}

impl FromStr for VideoModel {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = canonical(s);
        VideoModel::ALL
            .into_iter()
            .find(|m| m.id() == key || m.id().replace('-', "") == key.replace('-', ""))
            .ok_or_else(|| UnknownModel(s.to_string()))
    }
}

impl FromStr for AudioModel {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = canonical(s).replace('-', "");
        AudioModel::ALL
            .into_iter()
            .find(|m| m.id() == key)
            .ok_or_else(|| UnknownModel(s.to_string()))
    }
}

impl FromStr for Model {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<VideoModel>()
            .map(Model::Video)
            .or_else(|_| s.parse::<AudioModel>().map(Model::Audio))
    }
}

impl fmt::Display for VideoModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl fmt::Display for AudioModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl From<VideoModel> for Model {
    fn from(m: VideoModel) -> Self {
        Model::Video(m)
    }
}

impl From<AudioModel> for Model {
    fn from(m: AudioModel) -> Self {
        Model::Audio(m)
    }
}
