use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "lexiseg", version, about = "Unsupervised word segmentation pipeline")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a lexicon by EM (or build a structure-word lexicon).
    Train(TrainArgs),
    /// Segment sequences with a lexicon, or emit structure segmentations.
    Segment(SegmentArgs),
    /// Boundary precision/recall/F of a prediction against a gold file.
    Eval(EvalArgs),
    /// Word-occurrence distribution of a segmentation.
    Stats(StatsArgs),
    /// Description length of a segmentation.
    Dl(DlArgs),
    /// Protein-word coverage of DNA windows.
    Coverage(CoverageArgs),
    /// Cut sequences into fixed-width windows.
    Window(WindowArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Train(_) => "train",
            Command::Segment(_) => "segment",
            Command::Eval(_) => "eval",
            Command::Stats(_) => "stats",
            Command::Dl(_) => "dl",
            Command::Coverage(_) => "coverage",
            Command::Window(_) => "window",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Train(a) => &a.common,
            Command::Segment(a) => &a.common,
            Command::Eval(a) => &a.common,
            Command::Stats(a) => &a.common,
            Command::Dl(a) => &a.common,
            Command::Coverage(a) => &a.common,
            Command::Window(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Worker threads; results are identical for any value.
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    pub threads: usize,
    /// Flat `key = value` file supplying defaults for long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Recorded in every output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Plain,
    Fasta,
    Paired,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AlphabetArg {
    Generic,
    Amino20,
    Dna4,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OovArg {
    Reject,
    Abort,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// `generic` infers the symbol set from the input.
    #[arg(long, value_enum, default_value_t = AlphabetArg::Generic)]
    pub alphabet: AlphabetArg,
    /// Records with symbols outside the alphabet: drop them or fail.
    #[arg(long, value_enum, default_value_t = OovArg::Reject)]
    pub oov: OovArg,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum InitArg {
    Uniform,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FilterStage {
    Before,
    After,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 9)]
    pub max_len: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Soft)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub prune_below: f64,
    #[arg(long, default_value_t = 2)]
    pub min_count: u64,
    #[arg(long, default_value_t = 0.0)]
    pub min_border_entropy: f64,
    #[arg(long)]
    pub keep_singletons: bool,
    /// Apply the candidate filter before EM or to the trained lexicon.
    #[arg(long, value_enum, default_value_t = FilterStage::Before)]
    pub filter_stage: FilterStage,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    pub init: InitArg,
    #[arg(long)]
    pub fallback_log_prob: Option<f64>,
    /// Build the structure-word MLE lexicon from paired input instead of EM.
    #[arg(long)]
    pub structure: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Iteration log TSV; defaults to `<out>.iters.tsv`.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, required_unless_present = "structure_gold")]
    pub lexicon: Option<PathBuf>,
    /// With paired input, write the structure segmentation instead.
    #[arg(long)]
    pub structure_gold: bool,
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AveragingArg {
    Micro,
    Macro,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub predicted: PathBuf,
    #[arg(long, value_enum, default_value_t = AveragingArg::Micro)]
    pub averaging: AveragingArg,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StatsArgs {
    /// Segmentation file (space-separated tokens).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Frequency histogram TSV: frequency, words, letters.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DlArgs {
    /// Segmentation file (space-separated tokens).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, value_enum, default_value_t = AlphabetArg::Generic)]
    pub alphabet: AlphabetArg,
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoverageArgs {
    /// DNA FASTA.
    #[arg(long)]
    pub input: PathBuf,
    /// Protein-word lexicon.
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub width: usize,
    /// Leave short trailing windows out of the report.
    #[arg(long)]
    pub drop_remainder: bool,
    #[arg(long, default_value_t = 1e-6f64.ln(), allow_negative_numbers = true)]
    pub red_penalty: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub green_bonus: f64,
    #[arg(long)]
    pub renormalize: bool,
    /// CoverageReport JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Histogram TSV: bin_low, bin_high, count, fraction.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    /// Annotated spans, one window per line.
    #[arg(long)]
    pub annotated: Option<PathBuf>,
    /// Proteins read off green runs, one per line (plain format).
    #[arg(long)]
    pub roundtrip_corpus: Option<PathBuf>,
    /// Gold segmentation of the round-trip proteins.
    #[arg(long)]
    pub roundtrip_gold: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WindowArgs {
    /// FASTA input.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub width: usize,
    #[arg(long)]
    pub drop_remainder: bool,
    #[arg(long, value_enum, default_value_t = AlphabetArg::Dna4)]
    pub alphabet: AlphabetArg,
    /// FASTA output.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}
