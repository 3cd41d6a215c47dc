//! `oavqa`: score computation, MOS, fusion training and benchmarking from the command line.

mod commands;
mod logging;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oavqa::fusion::FusionMethod;
use oavqa::models::{AudioModel, VideoModel};

#[derive(Debug, Parser)]
#[command(name = "oavqa", version, about = "Omnidirectional audio-visual quality assessment")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute single-mode scores for every manifest entry into a score store.
    Metrics(MetricsArgs),
    /// Turn raw ratings into per-sequence MOS.
    Mos(MosArgs),
    /// Fit a fusion model on the training split.
    Train(TrainArgs),
    /// Evaluate every video x audio x method cell on the test split.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Comma-separated video models, or `all`.
    #[arg(long, value_delimiter = ',')]
    video_models: Vec<String>,
    /// Comma-separated audio models, or `all`.
    #[arg(long, value_delimiter = ',')]
    audio_models: Vec<String>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Score store directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    models: ModelArgs,
    /// Frame width of the raw I420 files.
    #[arg(long)]
    width: Option<usize>,
    /// Frame height of the raw I420 files.
    #[arg(long)]
    height: Option<usize>,
    /// Fibonacci lattice size for S-PSNR.
    #[arg(long, default_value_t = oavqa::sphere::DEFAULT_SPHERE_POINTS)]
    sphere_points: usize,
    /// Directory of `<model>.csv` score files (`id,model,score,f1..fK`).
    #[arg(long)]
    external_scores: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MosArgs {
    /// Long-format `subject_id,sequence_id,rating` CSV.
    #[arg(long)]
    ratings: PathBuf,
    /// Output `sequence_id,mos` CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SvrArgs {
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    #[arg(long, default_value_t = 1024.0)]
    c: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Score store written by `metrics`.
    #[arg(long)]
    scores: PathBuf,
    /// Directory for model files and training_summary.json.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    models: ModelArgs,
    #[arg(long, default_value = "wp")]
    method: FusionMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    svr: SvrArgs,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    scores: PathBuf,
    /// Directory for benchmark.csv, benchmark.txt and benchmark.json.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    models: ModelArgs,
    /// Comma-separated fusion methods (default: all three).
    #[arg(long, value_delimiter = ',')]
    method: Vec<FusionMethod>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Average over this many splits (seeds seed, seed + 1, ...).
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Only list single-mode SRCC/PLCC.
    #[arg(long)]
    single_mode_only: bool,
    #[command(flatten)]
    svr: SvrArgs,
}

fn parse_list<M: std::str::FromStr + Copy>(names: &[String], all: &[M]) -> Result<Option<Vec<M>>, String>
where
    M::Err: std::fmt::Display,
{
    if names.is_empty() {
        return Ok(None);
    }
    if names.iter().any(|n| n.eq_ignore_ascii_case("all")) {
        return Ok(Some(all.to_vec()));
    }
    names.iter().map(|n| n.trim().parse::<M>().map_err(|e| e.to_string())).collect::<Result<_, _>>().map(Some)
}

impl ModelArgs {
    fn video(&self) -> Result<Option<Vec<VideoModel>>, String> {
        parse_list(&self.video_models, &VideoModel::ALL)
    }

    fn audio(&self) -> Result<Option<Vec<AudioModel>>, String> {
        parse_list(&self.audio_models, &AudioModel::ALL)
    }
}

fn main() -> ExitCode {
    logging::init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let result = match cli.command {
        Command::Metrics(a) => commands::metrics(a),
        Command::Mos(a) => commands::mos(a),
        Command::Train(a) => commands::train(a),
        Command::Benchmark(a) => commands::benchmark(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.code())
        }
    }
}
