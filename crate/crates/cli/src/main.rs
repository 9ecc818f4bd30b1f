//! `tmtext`: train, evaluate, cross-validate, explain and benchmark Tsetlin
//! Machine text classifiers.

mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "tmtext", version, about = "Tsetlin Machine text classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model and write it to disk.
    Train(TrainArgs),
    /// Score a saved model on a dataset split.
    Eval(EvalArgs),
    /// Repeated stratified k-fold cross-validation.
    Cv(CvArgs),
    /// Export a model's rules, or explain the prediction for one text.
    Explain(ExplainArgs),
    /// Measure training and inference throughput in documents per second.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DatasetName {
    /// Large Movie Review Dataset (aclImdb layout).
    Imdb,
    /// 20 Newsgroups, grouped into super-categories.
    #[value(name = "20ng")]
    Newsgroups,
    /// One directory per class label.
    Dirs,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    #[arg(long, value_enum)]
    pub dataset: DatasetName,
    /// Dataset root. Defaults to $TMTEXT_DATA_DIR.
    #[arg(long, env = "TMTEXT_DATA_DIR")]
    pub data_dir: PathBuf,
    /// Newsgroup grouping file with `newsgroup category` lines.
    #[arg(long)]
    pub grouping: Option<PathBuf>,
    /// Training fraction for datasets without a published split.
    #[arg(long, default_value_t = 0.8)]
    pub holdout: f64,
}

#[derive(Args, Debug, Clone)]
pub struct TextArgs {
    /// Number of features kept by information gain.
    #[arg(long, default_value_t = 5000)]
    pub features: usize,
    /// Word n-gram sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub ngrams: Vec<usize>,
    /// Minimum document frequency of a term.
    #[arg(long, default_value_t = 2)]
    pub min_df: usize,
}

#[derive(Args, Debug, Clone)]
pub struct MachineArgs {
    /// Clauses per class.
    #[arg(long, default_value_t = 2000)]
    pub clauses: usize,
    /// States per action (N).
    #[arg(long, default_value_t = 100)]
    pub states: usize,
    /// Specificity.
    #[arg(long, default_value_t = 27.0)]
    pub s: f64,
    /// Vote threshold (T).
    #[arg(long, default_value_t = 20)]
    pub threshold: u32,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Update clauses on all cores.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub text: TextArgs,
    #[command(flatten)]
    pub machine: MachineArgs,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch history CSV.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Skip the per-epoch training-set accuracy pass.
    #[arg(long)]
    pub skip_train_acc: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SplitName {
    Train,
    Test,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = SplitName::Test)]
    pub split: SplitName,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub text: TextArgs,
    #[command(flatten)]
    pub machine: MachineArgs,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Confidence level of the reported intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Explain the prediction for this text instead of exporting rules.
    #[arg(long, conflicts_with = "file")]
    pub text: Option<String>,
    /// Explain the prediction for the contents of this file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Keep the best N rules per class.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long)]
    pub json: bool,
    /// Training split used to count rule support.
    #[command(flatten)]
    pub reference: OptDataArgs,
}

/// Dataset flags for commands where data is optional.
#[derive(Args, Debug, Clone)]
pub struct OptDataArgs {
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetName>,
    /// Dataset root. Defaults to $TMTEXT_DATA_DIR.
    #[arg(long, env = "TMTEXT_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub grouping: Option<PathBuf>,
    #[arg(long, default_value_t = 0.8)]
    pub holdout: f64,
}

impl OptDataArgs {
    /// `Some` when a dataset was named; the data directory is then required.
    pub fn resolve(&self) -> Result<Option<DataArgs>, UsageError> {
        let Some(dataset) = self.dataset else { return Ok(None) };
        let data_dir = self
            .data_dir
            .clone()
            .ok_or_else(|| UsageError("--dataset needs --data-dir or TMTEXT_DATA_DIR".into()))?;
        Ok(Some(DataArgs { dataset, data_dir, grouping: self.grouping.clone(), holdout: self.holdout }))
    }
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Benchmark on a real dataset instead of synthetic documents.
    #[command(flatten)]
    pub data: OptDataArgs,
    #[command(flatten)]
    pub text: TextArgs,
    #[command(flatten)]
    pub machine: MachineArgs,
    /// Synthetic documents to generate.
    #[arg(long, default_value_t = 2000)]
    pub docs: usize,
    /// Fraction of set bits in synthetic documents.
    #[arg(long, default_value_t = 0.05)]
    pub density: f64,
}

/// A flag combination or value the library rejected before doing any work.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Cv(a) => commands::cv(a),
        Command::Explain(a) => commands::explain(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}
