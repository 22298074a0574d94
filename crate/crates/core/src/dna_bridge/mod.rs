//! Protein words over DNA: codon translation, green/red coverage
//! segmentation, windowed coverage statistics, and the round trip back to
//! segmented protein sequences.
//!
//! A DNA span counts as a protein-word span when its in-frame translation
//! is a lexicon word, which is the same as membership in the fully
//! back-translated DNA vocabulary without ever materializing it. Each
//! candidate span is read in its own frame.

mod code;
mod coverage;

pub use code::{GeneticCode, Translation};
pub use coverage::{
    coverage_report, coverage_segment, dna_roundtrip_corpus, roundtrip_to_corpus, CoverageConfig,
    CoverageReport, CoverageSegmentation, CoverageSpan, RoundTripRecord, SpanKind, WindowCoverage,
    HISTOGRAM_BINS,
};
