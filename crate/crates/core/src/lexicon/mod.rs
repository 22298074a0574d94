//! Word lexicons: candidate extraction, filtering, and the probability
//! table used for decoding and training.

mod candidates;
mod tsv;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub use candidates::{border_entropy, extract_candidates, filter_candidates, CandidateTable, FilterConfig};
pub use tsv::{read_lexicon, write_lexicon};

/// Per-symbol log-probability charged for out-of-vocabulary single symbols.
pub const DEFAULT_FALLBACK_LOG_PROB: f64 = -20.723_265_836_946_41; // ln(1e-9)

/// Tolerance on `Σ P(w) = 1`.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A unigram word model: word → probability, with optional counts.
///
/// Words keep a stable integer id (their insertion position) so trainers
/// can accumulate into dense vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    words: Vec<String>,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
    counts: Option<Vec<f64>>,
    index: HashMap<String, u32>,
    max_len: usize,
    fallback_log_prob: f64,
}

impl Lexicon {
    /// Builds a lexicon from probabilities that already sum to 1 within
    /// [`SUM_TOLERANCE`].
    pub fn from_probs<S: Into<String>>(entries: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (words, probs) = Self::collect(entries)?;
        if let Some(p) = probs.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidLexicon(format!("probability {p} outside (0, 1]")));
        }
        let sum = stable_sum(probs.iter().copied());
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidLexicon(format!("probabilities sum to {sum}")));
        }
        Self::assemble(words, probs)
    }

    /// Builds a lexicon from positive weights, normalizing them.
    pub fn from_weights<S: Into<String>>(entries: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (words, weights) = Self::collect(entries)?;
        if let Some(w) = weights.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidLexicon(format!("weight {w} is not positive")));
        }
        let total = stable_sum(weights.iter().copied());
        Self::assemble(words, weights.iter().map(|w| w / total).collect())
    }

    fn collect<S: Into<String>>(
        entries: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<(Vec<String>, Vec<f64>)> {
        let (words, values): (Vec<String>, Vec<f64>) =
            entries.into_iter().map(|(w, p)| (w.into(), p)).unzip();
        if words.is_empty() {
            return Err(Error::Empty("lexicon has no words".into()));
        }
        if words.iter().any(String::is_empty) {
            return Err(Error::InvalidLexicon("empty word".into()));
        }
        Ok((words, values))
    }

    fn assemble(words: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::InvalidLexicon(format!("duplicate word {w:?}")));
            }
        }
        let max_len = words.iter().map(|w| w.chars().count()).max().unwrap_or(1);
        Ok(Lexicon {
            log_probs: probs.iter().map(|p| p.ln()).collect(),
            words,
            probs,
            counts: None,
            index,
            max_len,
            fallback_log_prob: DEFAULT_FALLBACK_LOG_PROB,
        })
    }

    /// Attaches counts, one per word in id order.
    pub fn with_counts(mut self, counts: Vec<f64>) -> Result<Self> {
        if counts.len() != self.words.len() {
            return Err(Error::InvalidLexicon(format!(
                "{} counts for {} words",
                counts.len(),
                self.words.len()
            )));
        }
        if counts.iter().any(|c| !(*c >= 0.0)) {
            return Err(Error::InvalidLexicon("negative count".into()));
        }
        self.counts = Some(counts);
        Ok(self)
    }

    /// Raises the declared maximum word length (it can never be below the
    /// longest word).
    pub fn with_max_len(mut self, max_len: usize) -> Result<Self> {
        if max_len < self.max_len {
            return Err(Error::InvalidLexicon(format!(
                "max_len {max_len} is shorter than the longest word ({})",
                self.max_len
            )));
        }
        self.max_len = max_len;
        Ok(self)
    }

    pub fn with_fallback_log_prob(mut self, lp: f64) -> Result<Self> {
        if !(lp.is_finite() && lp <= 0.0) {
            return Err(Error::InvalidLexicon(format!(
                "fallback log-probability {lp} must be finite and <= 0"
            )));
        }
        self.fallback_log_prob = lp;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn fallback_log_prob(&self) -> f64 {
        self.fallback_log_prob
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn prob(&self, word: &str) -> Option<f64> {
        self.id(word).map(|i| self.probs[i as usize])
    }

    pub fn log_prob(&self, word: &str) -> Option<f64> {
        self.id(word).map(|i| self.log_probs[i as usize])
    }

    pub(crate) fn log_prob_by_id(&self, id: u32) -> f64 {
        self.log_probs[id as usize]
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn counts(&self) -> Option<&[f64]> {
        self.counts.as_deref()
    }

    pub fn prob_sum(&self) -> f64 {
        stable_sum(self.probs.iter().copied())
    }

    /// `(word, probability, count)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64, Option<f64>)> + '_ {
        self.words.iter().enumerate().map(move |(i, w)| {
            (w.as_str(), self.probs[i], self.counts.as_ref().map(|c| c[i]))
        })
    }

    /// Ids sorted by descending probability, then lexicographically.
    pub fn ranked_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = (0..self.words.len() as u32).collect();
        ids.sort_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            self.probs[b]
                .total_cmp(&self.probs[a])
                .then_with(|| self.words[a].cmp(&self.words[b]))
        });
        ids
    }

    /// A renormalized copy holding only the words for which `keep` is true.
    /// Settings (max_len, fallback) carry over.
    pub fn retain(&self, mut keep: impl FnMut(&str, f64) -> bool) -> Result<Lexicon> {
        let kept: Vec<usize> = (0..self.words.len())
            .filter(|&i| keep(&self.words[i], self.probs[i]))
            .collect();
        let mut out = Lexicon::from_weights(kept.iter().map(|&i| (self.words[i].clone(), self.probs[i])))?;
        if let Some(c) = &self.counts {
            out = out.with_counts(kept.iter().map(|&i| c[i]).collect())?;
        }
        out.max_len = self.max_len;
        out.fallback_log_prob = self.fallback_log_prob;
        Ok(out)
    }

    /// Same settings as `self`, new word set. Used by trainers.
    pub(crate) fn rebuild(&self, words: Vec<String>, probs: Vec<f64>, counts: Vec<f64>) -> Result<Lexicon> {
        let mut out = Lexicon::from_weights(words.into_iter().zip(probs))?.with_counts(counts)?;
        out.max_len = self.max_len;
        out.fallback_log_prob = self.fallback_log_prob;
        Ok(out)
    }
}

/// Equal probability for every candidate; candidate counts are copied.
pub fn uniform_init(table: &CandidateTable) -> Result<Lexicon> {
    init_with(table, |_| 1.0)
}

/// Seeded random positive probabilities.
pub fn random_init(table: &CandidateTable, seed: u64) -> Result<Lexicon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    init_with(table, move |_| rng.gen_range(0.01..1.0))
}

fn init_with(table: &CandidateTable, mut weight: impl FnMut(&str) -> f64) -> Result<Lexicon> {
    if table.is_empty() {
        return Err(Error::Empty("candidate table is empty".into()));
    }
    let weights: Vec<(String, f64)> = table
        .counts()
        .keys()
        .map(|w| (w.clone(), weight(w)))
        .collect();
    Lexicon::from_weights(weights)?
        .with_counts(table.counts().values().map(|&c| c as f64).collect())?
        .with_max_len(table.max_len().max(1))
}

/// Compensated (Neumaier) sum; plain summation drifts past 1e-9 on
/// million-word tables.
pub(crate) fn stable_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
