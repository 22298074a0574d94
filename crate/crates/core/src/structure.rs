//! Structure segmentation: maximal runs of residues sharing one
//! secondary-structure state become tokens ("structure words").
//!
//! States are opaque characters, so DSSP, STRIDE or any other assignment
//! works; blanks and `-` are states like any other.

use std::collections::BTreeMap;

use crate::corpus_io::{PairedCorpus, PairedRecord};
use crate::{Error, Lexicon, Result, Segmentation};

/// Counts of distinct structure words (residue strings, not
/// string/state pairs).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructureWordTable {
    counts: BTreeMap<String, u64>,
}

impl StructureWordTable {
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Cuts wherever the structure state changes.
pub fn structure_segment(rec: &PairedRecord) -> Segmentation {
    let states: Vec<char> = rec.structure().chars().collect();
    let cuts = (1..states.len()).filter(|&i| states[i] != states[i - 1]);
    Segmentation::from_boundaries(states.len(), cuts).expect("paired record is non-empty")
}

/// Structure-word counts over the corpus and the MLE lexicon
/// `P(w) = count(w) / total tokens`, with counts attached.
pub fn build_structure_lexicon(corpus: &PairedCorpus) -> Result<(StructureWordTable, Lexicon)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for rec in corpus.records() {
        let seg = structure_segment(rec);
        for tok in seg.tokens(rec.sequence().as_str())? {
            *counts.entry(tok.to_string()).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::Empty("no structure words".into()));
    }
    let lexicon = Lexicon::from_weights(counts.iter().map(|(w, &c)| (w.clone(), c as f64)))?
        .with_counts(counts.values().map(|&c| c as f64).collect())?;
    Ok((StructureWordTable { counts }, lexicon))
}
