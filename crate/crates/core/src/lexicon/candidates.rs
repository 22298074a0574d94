//! Candidate word extraction and frequency / border-entropy filtering.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus_io::{char_offsets, Corpus, Sequence};
use crate::{Error, Result};

/// Sequences per parallel work unit. Fixed so results never depend on the
/// thread count.
const CHUNK: usize = 256;

/// Overlapping substring counts for every word up to `max_len` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateTable {
    counts: BTreeMap<String, u64>,
    max_len: usize,
}

impl CandidateTable {
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }
}

fn count_chunk(seqs: &[Sequence], max_len: usize) -> HashMap<&str, u64> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for seq in seqs {
        let s = seq.as_str();
        let off = char_offsets(s);
        let n = off.len() - 1;
        for i in 0..n {
            for j in (i + 1)..=(i + max_len).min(n) {
                *counts.entry(&s[off[i]..off[j]]).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Counts every substring of length `1..=max_len` at every position.
pub fn extract_candidates(corpus: &Corpus, max_len: usize) -> Result<CandidateTable> {
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be >= 1".into()));
    }
    if corpus.total_symbols() == 0 {
        return Err(Error::Empty("corpus has no symbols".into()));
    }
    let partials: Vec<HashMap<&str, u64>> = corpus
        .records()
        .par_chunks(CHUNK)
        .map(|c| count_chunk(c, max_len))
        .collect();
    let mut counts = BTreeMap::new();
    for part in partials {
        for (w, c) in part {
            *counts.entry(w.to_string()).or_insert(0) += c;
        }
    }
    Ok(CandidateTable { counts, max_len })
}

/// Successor / predecessor symbol distribution of one word. `None` is the
/// sequence start (left) or end (right) marker.
#[derive(Debug, Default, Clone)]
struct Contexts {
    left: HashMap<Option<char>, u64>,
    right: HashMap<Option<char>, u64>,
}

impl Contexts {
    fn add(&mut self, s: &str, off: &[usize], i: usize, j: usize) {
        let left = (i > 0).then(|| s[off[i - 1]..off[i]].chars().next().unwrap());
        let right = (j + 1 < off.len()).then(|| s[off[j]..off[j + 1]].chars().next().unwrap());
        *self.left.entry(left).or_insert(0) += 1;
        *self.right.entry(right).or_insert(0) += 1;
    }

    fn bits(&self) -> (f64, f64) {
        (entropy_bits(self.left.values()), entropy_bits(self.right.values()))
    }
}

fn entropy_bits<'a>(counts: impl Iterator<Item = &'a u64> + Clone) -> f64 {
    let total: u64 = counts.clone().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let h: f64 = counts
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Left and right branching entropy (bits) of `word` over all of its
/// occurrences in `corpus`.
pub fn border_entropy(word: &str, corpus: &Corpus) -> Result<(f64, f64)> {
    let target = word.chars().count();
    if target == 0 {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    let mut ctx = Contexts::default();
    for seq in corpus {
        let s = seq.as_str();
        let off = char_offsets(s);
        let n = off.len() - 1;
        for i in 0..n.saturating_sub(target - 1) {
            let j = i + target;
            if &s[off[i]..off[j]] == word {
                ctx.add(s, &off, i, j);
            }
        }
    }
    if ctx.right.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "word {word:?} does not occur in the corpus"
        )));
    }
    Ok(ctx.bits())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterConfig {
    pub min_count: u64,
    /// Threshold on `min(left_bits, right_bits)`; 0 disables the test.
    pub min_border_entropy: f64,
    /// Keep words seen exactly once regardless of `min_count`.
    pub keep_singletons: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_count: 2,
            min_border_entropy: 0.0,
            keep_singletons: false,
        }
    }
}

impl FilterConfig {
    fn validate(&self) -> Result<()> {
        if self.min_count == 0 {
            return Err(Error::InvalidArgument("min_count must be >= 1".into()));
        }
        if !(self.min_border_entropy >= 0.0) {
            return Err(Error::InvalidArgument(
                "min_border_entropy must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn passes_count(&self, count: u64) -> bool {
        count >= self.min_count || (self.keep_singletons && count == 1)
    }
}

/// Keeps words passing the frequency and border-entropy thresholds.
/// Single-symbol words are always kept.
pub fn filter_candidates(
    table: &CandidateTable,
    corpus: &Corpus,
    cfg: &FilterConfig,
) -> Result<CandidateTable> {
    cfg.validate()?;
    let single = |w: &str| w.chars().nth(1).is_none();
    let mut kept: BTreeMap<String, u64> = table
        .counts
        .iter()
        .filter(|(w, &c)| single(w) || cfg.passes_count(c))
        .map(|(w, &c)| (w.clone(), c))
        .collect();

    if cfg.min_border_entropy > 0.0 {
        let mut ctx: HashMap<&str, Contexts> = kept
            .keys()
            .filter(|w| !single(w))
            .map(|w| (w.as_str(), Contexts::default()))
            .collect();
        for seq in corpus {
            let s = seq.as_str();
            let off = char_offsets(s);
            let n = off.len() - 1;
            for i in 0..n {
                for j in (i + 2)..=(i + table.max_len).min(n) {
                    if let Some(c) = ctx.get_mut(&s[off[i]..off[j]]) {
                        c.add(s, &off, i, j);
                    }
                }
            }
        }
        let drop: Vec<String> = ctx
            .iter()
            .filter(|(_, c)| {
                let (l, r) = c.bits();
                l.min(r) < cfg.min_border_entropy
            })
            .map(|(w, _)| w.to_string())
            .collect();
        for w in drop {
            kept.remove(&w);
        }
    }
    Ok(CandidateTable {
        counts: kept,
        max_len: table.max_len,
    })
}
