//! Unsupervised word segmentation over symbol sequences.
//!
//! A unigram word lexicon is learned from unsegmented sequences with
//! soft-counting EM (forward-backward expectations over the segmentation
//! lattice), sequences are decoded with a Viterbi search, and segmentations
//! are scored by boundary precision/recall/F and by description length.
//!
//! The [`structure`] and [`dna_bridge`] modules apply the same machinery to
//! proteins: secondary-structure runs as a gold segmentation, and DNA
//! scanned for spans whose translation is a lexicon word.

pub mod corpus_io;
pub mod dna_bridge;
mod error;
pub mod lexicon;
pub mod metrics;
pub mod segmenter;
pub mod structure;

pub use error::{Error, Result};

pub use corpus_io::{Alphabet, AlphabetKind, Corpus, PairedCorpus, PairedRecord, Sequence};
pub use lexicon::{CandidateTable, FilterConfig, Lexicon};
pub use segmenter::{Segmentation, TrainConfig, TrainMode};
