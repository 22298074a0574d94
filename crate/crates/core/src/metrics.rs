//! Segmentation quality: boundary precision/recall/F, word-occurrence
//! distribution, and description length.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus_io::Alphabet;
use crate::{Error, Lexicon, Result, Segmentation};

/// Boundary evaluation. Sequence start and end are not boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub gold_boundaries: u64,
    pub predicted_boundaries: u64,
    pub correct_boundaries: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * recall * precision / (recall + precision)
    } else {
        0.0
    }
}

impl EvalReport {
    pub fn from_counts(gold: u64, predicted: u64, correct: u64) -> Self {
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, gold);
        EvalReport {
            precision,
            recall,
            f_score: f_measure(precision, recall),
            gold_boundaries: gold,
            predicted_boundaries: predicted,
            correct_boundaries: correct,
        }
    }
}

fn boundary_counts(gold: &Segmentation, predicted: &Segmentation) -> Result<(u64, u64, u64)> {
    if gold.len() != predicted.len() {
        return Err(Error::InvalidSegmentation(format!(
            "gold covers {} symbols, prediction {}",
            gold.len(),
            predicted.len()
        )));
    }
    let g: BTreeSet<usize> = gold.internal_boundaries().iter().copied().collect();
    let correct = predicted
        .internal_boundaries()
        .iter()
        .filter(|b| g.contains(b))
        .count();
    Ok((
        g.len() as u64,
        predicted.internal_boundaries().len() as u64,
        correct as u64,
    ))
}

pub fn boundary_prf(gold: &Segmentation, predicted: &Segmentation) -> Result<EvalReport> {
    let (g, p, c) = boundary_counts(gold, predicted)?;
    Ok(EvalReport::from_counts(g, p, c))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Pool boundary counts over all records, then divide.
    #[default]
    Micro,
    /// Mean of per-record P, R and F; counts are still pooled.
    Macro,
}

/// Corpus-level boundary evaluation over `(gold, predicted)` pairs.
pub fn corpus_prf<'a>(
    pairs: impl IntoIterator<Item = (&'a Segmentation, &'a Segmentation)>,
    averaging: Averaging,
) -> Result<EvalReport> {
    let (mut g, mut p, mut c) = (0, 0, 0);
    let (mut sp, mut sr, mut sf, mut n) = (0.0, 0.0, 0.0, 0usize);
    for (gold, pred) in pairs {
        let (gi, pi, ci) = boundary_counts(gold, pred)?;
        g += gi;
        p += pi;
        c += ci;
        let r = EvalReport::from_counts(gi, pi, ci);
        sp += r.precision;
        sr += r.recall;
        sf += r.f_score;
        n += 1;
    }
    let pooled = EvalReport::from_counts(g, p, c);
    Ok(match averaging {
        Averaging::Micro => pooled,
        Averaging::Macro if n > 0 => EvalReport {
            precision: sp / n as f64,
            recall: sr / n as f64,
            f_score: sf / n as f64,
            ..pooled
        },
        Averaging::Macro => pooled,
    })
}

/// Token frequencies of a segmented corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenCounts {
    counts: BTreeMap<String, u64>,
    letters: u64,
    tokens: u64,
}

impl TokenCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: &str) {
        *self.counts.entry(token.to_string()).or_insert(0) += 1;
        self.letters += token.chars().count() as u64;
        self.tokens += 1;
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    pub fn total_letters(&self) -> u64 {
        self.letters
    }

    pub fn total_tokens(&self) -> u64 {
        self.tokens
    }

    /// Share of corpus letters inside occurrences of words selected by
    /// `pred(word, frequency)`.
    pub fn letter_share(&self, mut pred: impl FnMut(&str, u64) -> bool) -> f64 {
        let covered: u64 = self
            .counts
            .iter()
            .filter(|(w, &f)| pred(w, f))
            .map(|(w, &f)| f * w.chars().count() as u64)
            .sum();
        ratio(covered, self.letters)
    }

    /// Vocabulary ranked by descending frequency, ties lexicographic.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(w, &f)| (w.as_str(), f)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// `(frequency, words with that frequency, letters they cover)`,
    /// ascending by frequency.
    pub fn frequency_histogram(&self) -> Vec<(u64, u64, u64)> {
        let mut h: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        for (w, &f) in &self.counts {
            let e = h.entry(f).or_insert((0, 0));
            e.0 += 1;
            e.1 += f * w.chars().count() as u64;
        }
        h.into_iter().map(|(f, (n, l))| (f, n, l)).collect()
    }
}

impl<'a> FromIterator<&'a str> for TokenCounts {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut t = TokenCounts::new();
        for tok in iter {
            t.add(tok);
        }
        t
    }
}

/// Fraction of the vocabulary treated as high-frequency.
pub const HIGH_FREQ_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccurrenceStats {
    /// Letters covered by the top-10% most frequent words.
    pub high_freq_letter_pct: f64,
    /// Letters covered by words occurring exactly once.
    pub low_freq_letter_pct: f64,
    /// Share of the vocabulary occurring exactly once.
    pub singleton_vocab_pct: f64,
}

/// Occurrence distribution of a segmented corpus. The vocabulary is the set
/// of distinct tokens; the high-frequency set is the first
/// `ceil(10% · |vocab|)` words of [`TokenCounts::ranked`].
pub fn occurrence_stats(tokens: &TokenCounts) -> Result<OccurrenceStats> {
    if tokens.vocab_size() == 0 {
        return Err(Error::Empty("segmented corpus has no tokens".into()));
    }
    let v = tokens.vocab_size();
    let top = ((v as f64 * HIGH_FREQ_FRACTION).ceil() as usize).clamp(1, v);
    let high: BTreeSet<&str> = tokens.ranked().into_iter().take(top).map(|(w, _)| w).collect();
    let singletons = tokens.counts.values().filter(|&&f| f == 1).count();
    Ok(OccurrenceStats {
        high_freq_letter_pct: tokens.letter_share(|w, _| high.contains(w)),
        low_freq_letter_pct: tokens.letter_share(|_, f| f == 1),
        singleton_vocab_pct: singletons as f64 / v as f64,
    })
}

/// Description length in bits, codebook plus encoded corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DLReport {
    pub codebook_bits: f64,
    pub corpus_bits: f64,
    pub total_bits: f64,
    pub codebook_fraction: f64,
}

/// Context for a [`DLReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DLDetails {
    /// The corpus spelled letter by letter at its empirical letter entropy,
    /// with no codebook.
    pub letter_baseline_bits: f64,
    pub used_vocab: usize,
    /// Lexicon words the segmentation never uses (not charged).
    pub unused_vocab: usize,
    pub tokens: u64,
}

/// Description length of a segmentation used as a code.
///
/// The codebook spells each used word in raw letters at
/// `log2 |alphabet|` bits per letter; the corpus costs `-log2 P̂(w)` per
/// token, with `P̂` the empirical token distribution. Every token must be a
/// lexicon word or a single alphabet symbol.
pub fn description_length(
    tokens: &TokenCounts,
    lexicon: &Lexicon,
    alphabet: &Alphabet,
) -> Result<(DLReport, DLDetails)> {
    if tokens.total_tokens() == 0 {
        return Err(Error::Empty("segmented corpus has no tokens".into()));
    }
    let bits = alphabet.bits_per_symbol();
    let n = tokens.total_tokens() as f64;
    let mut codebook = 0.0;
    let mut corpus = 0.0;
    let mut letters: BTreeMap<char, u64> = BTreeMap::new();
    let mut used_in_lexicon = 0;
    for (w, &f) in tokens.counts() {
        let mut chars = w.chars();
        let single = chars.next().filter(|_| chars.next().is_none());
        if lexicon.contains(w) {
            used_in_lexicon += 1;
        } else if !single.is_some_and(|c| alphabet.contains(c)) {
            return Err(Error::UnknownToken(w.clone()));
        }
        codebook += w.chars().count() as f64 * bits;
        corpus += -(f as f64) * (f as f64 / n).log2();
        for c in w.chars() {
            *letters.entry(c).or_insert(0) += f;
        }
    }
    let total_letters = tokens.total_letters() as f64;
    let letter_baseline: f64 = letters
        .values()
        .map(|&c| -(c as f64) * (c as f64 / total_letters).log2())
        .sum();
    // -0.0 from a single-token corpus
    let corpus = corpus.max(0.0);
    let total = codebook + corpus;
    Ok((
        DLReport {
            codebook_bits: codebook,
            corpus_bits: corpus,
            total_bits: total,
            codebook_fraction: if total > 0.0 { codebook / total } else { 0.0 },
        },
        DLDetails {
            letter_baseline_bits: letter_baseline.max(0.0),
            used_vocab: tokens.vocab_size(),
            unused_vocab: lexicon.len() - used_in_lexicon,
            tokens: tokens.total_tokens(),
        },
    ))
}
