//! Command-line harness: corpus generation, feature extraction,
//! training-data synthesis, model training, cross-validated evaluation,
//! governor simulation, and report aggregation.

mod ops;
mod util;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "webfps", version, about = "Energy-aware web rendering toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Flags shared by commands that read a corpus and a platform spec.
#[derive(Args, Clone, serde::Serialize)]
struct CommonArgs {
    /// Corpus directory of .html/.css pairs (env WEBFPS_CORPUS as
    /// fallback)
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Platform spec: "jetson-tx2", "odroid-xu3", or a JSON file path
    #[arg(long, default_value = "jetson-tx2")]
    platform: String,
    /// Gesture to model/simulate
    #[arg(long, default_value = "scroll")]
    gesture: String,
    /// Root random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone, serde::Serialize)]
struct TrainArgs {
    #[arg(long, default_value_t = 5)]
    layers: usize,
    #[arg(long, default_value_t = 80)]
    width: usize,
    #[arg(long, default_value_t = 60)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
}

#[derive(Subcommand, Clone)]
enum Cmd {
    /// Generate a synthetic page corpus
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Extract raw feature vectors from a corpus into a CSV
    Extract {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Feature manifest JSON (bundled default when omitted)
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Synthesize the training grid (pages x rates x settings)
    GenData {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of corpus pages to use (sorted order)
        #[arg(long, default_value_t = 80)]
        pages: usize,
    },
    /// Train models from a training-grid CSV
    Train {
        /// Training CSV from gen-data
        #[arg(long)]
        data: PathBuf,
        /// transform.json from gen-data
        #[arg(long)]
        transform: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Five-fold cross-validated prediction error
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        pages: usize,
        /// Also fit the least-squares baseline per fold
        #[arg(long, default_value_t = false)]
        with_linear: bool,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Replay interaction sessions under the governors
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Model registry JSON from train
        #[arg(long)]
        model: PathBuf,
        /// transform.json matching the model
        #[arg(long)]
        transform: PathBuf,
        /// Comma-separated FPS floors; default: 20 users evenly in
        /// [20,45]
        #[arg(long)]
        fps_min: Option<String>,
        /// Comma-separated governors; default: all five
        #[arg(long)]
        governors: Option<String>,
        #[arg(long, default_value = "min-feasible")]
        search_mode: String,
        /// Headroom added to fps_min before the model-guided search
        #[arg(long, default_value_t = 2.0)]
        fps_margin: f64,
        #[arg(long, default_value_t = 2000.0)]
        duration_ms: f64,
    },
    /// Aggregate simulation artifacts into summary CSVs
    Report {
        /// Output directory of a simulate run
        #[arg(long)]
        sessions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Corpus dir; enables the feature-importance CSV
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "jetson-tx2")]
        platform: String,
    },
    /// Cross-validation error as a function of network depth
    LayerSweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated hidden-layer counts
        #[arg(long, default_value = "1,2,3,4,5,6,7,8")]
        layers: String,
        #[arg(long, default_value_t = 0)]
        pages: usize,
        #[command(flatten)]
        train: TrainArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::GenCorpus { out, count, seed } => ops::gen_corpus(&out, count, seed),
        Cmd::Extract { corpus, out, manifest } => ops::extract(corpus.as_deref(), &out, manifest.as_deref()),
        Cmd::GenData { common, pages } => ops::gen_data(&common, pages),
        Cmd::Train { data, transform, out, seed, train } => ops::train_cmd(&data, &transform, &out, seed, &train),
        Cmd::Eval { common, folds, pages, with_linear, train } => {
            ops::eval_cmd(&common, folds, pages, with_linear, &train)
        }
        Cmd::Simulate {
            common,
            model,
            transform,
            fps_min,
            governors,
            search_mode,
            fps_margin,
            duration_ms,
        } => ops::simulate(
            &common,
            &model,
            &transform,
            fps_min.as_deref(),
            governors.as_deref(),
            &search_mode,
            fps_margin,
            duration_ms,
        ),
        Cmd::Report { sessions, out, corpus, platform } => {
            ops::report(&sessions, &out, corpus.as_deref(), &platform)
        }
        Cmd::LayerSweep { common, layers, pages, train } => ops::layer_sweep(&common, &layers, pages, &train),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
