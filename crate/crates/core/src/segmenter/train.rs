use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus_io::{Corpus, Sequence};
use crate::lexicon::stable_sum;
use crate::{Error, Lexicon, Result};

use super::lattice::{posteriors, viterbi_str};
use super::Segmentation;

/// Sequences per E-step work unit. Partial counts are merged in chunk
/// order, so the floating-point result is independent of thread count.
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainMode {
    /// Expected counts over all segmentations (forward-backward).
    #[default]
    Soft,
    /// Counts from the single Viterbi segmentation of each sequence.
    Hard,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainConfig {
    /// Longest word the initial lexicon may contain.
    pub max_len: usize,
    pub mode: TrainMode,
    pub max_iters: usize,
    /// Stop when no word probability moves by more than this.
    pub tol: f64,
    /// Multi-symbol words whose probability falls below this are dropped.
    pub prune_below: f64,
    /// Carried for provenance; training itself is deterministic.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_len: 9,
            mode: TrainMode::Soft,
            max_iters: 100,
            tol: 1e-6,
            prune_below: 1e-12,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.max_len == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_len and max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be > 0".into()));
        }
        if !(self.prune_below >= 0.0) {
            return Err(Error::InvalidArgument("prune_below must be >= 0".into()));
        }
        Ok(())
    }
}

/// One EM iteration. `log_likelihood` is measured under the lexicon the
/// iteration started from (the marginal in soft mode, the Viterbi score in
/// hard mode); `vocab_size` and `max_delta` describe the update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub log_likelihood: f64,
    pub vocab_size: usize,
    pub max_delta: f64,
}

struct Estep {
    counts: Vec<f64>,
    log_likelihood: f64,
}

fn estep_chunk(seqs: &[Sequence], lexicon: &Lexicon, mode: TrainMode) -> Result<(HashMap<u32, f64>, f64)> {
    let mut counts: HashMap<u32, f64> = HashMap::new();
    let mut ll = 0.0;
    for seq in seqs {
        let seq_ll = match mode {
            TrainMode::Soft => {
                posteriors(seq.as_str(), lexicon, |word, _, _, post| {
                    if let Some(id) = word {
                        *counts.entry(id).or_insert(0.0) += post;
                    }
                })
                .seq_log_marginal
            }
            TrainMode::Hard => {
                let (seg, lp) = viterbi_str(seq.as_str(), lexicon);
                for tok in seg.tokens(seq.as_str())? {
                    if let Some(id) = lexicon.id(tok) {
                        *counts.entry(id).or_insert(0.0) += 1.0;
                    }
                }
                lp
            }
        };
        if !seq_ll.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lexicon assigns zero probability to sequence {}",
                seq.id()
            )));
        }
        ll += seq_ll;
    }
    Ok((counts, ll))
}

fn estep(corpus: &Corpus, lexicon: &Lexicon, mode: TrainMode) -> Result<Estep> {
    let parts: Vec<(HashMap<u32, f64>, f64)> = corpus
        .records()
        .par_chunks(CHUNK)
        .map(|c| estep_chunk(c, lexicon, mode))
        .collect::<Result<_>>()?;
    let mut counts = vec![0.0; lexicon.len()];
    let mut ll = 0.0;
    for (part, part_ll) in parts {
        for (id, c) in part {
            counts[id as usize] += c;
        }
        ll += part_ll;
    }
    Ok(Estep {
        counts,
        log_likelihood: ll,
    })
}

/// Re-estimates word probabilities by EM until no probability moves by more
/// than `cfg.tol` or `cfg.max_iters` is reached.
///
/// Each iteration sets `P(w) = count(w) / Σ count`, drops multi-symbol
/// words below `cfg.prune_below` (and any word with zero count), and
/// renormalizes. Single symbols with positive count are never pruned. The
/// returned lexicon carries the counts of its final update.
pub fn em_train(corpus: &Corpus, init: Lexicon, cfg: &TrainConfig) -> Result<(Lexicon, Vec<IterationRecord>)> {
    cfg.validate()?;
    if let Some(w) = init.words().iter().find(|w| w.chars().count() > cfg.max_len) {
        return Err(Error::InvalidArgument(format!(
            "initial lexicon word {w:?} is longer than max_len {}",
            cfg.max_len
        )));
    }
    let mut lexicon = init;
    let mut log = Vec::new();
    for iteration in 1..=cfg.max_iters {
        let e = estep(corpus, &lexicon, cfg.mode)?;
        let total = stable_sum(e.counts.iter().copied());
        if !(total > 0.0) {
            return Err(Error::InvalidArgument(
                "no lexicon word is used by any segmentation of the corpus".into(),
            ));
        }

        let mut words = Vec::with_capacity(lexicon.len());
        let mut probs = Vec::with_capacity(lexicon.len());
        let mut counts = Vec::with_capacity(lexicon.len());
        let mut kept_ids = Vec::with_capacity(lexicon.len());
        for (i, &c) in e.counts.iter().enumerate() {
            let p = c / total;
            let w = &lexicon.words()[i];
            let single = w.chars().nth(1).is_none();
            if p > 0.0 && (single || p >= cfg.prune_below) {
                words.push(w.clone());
                probs.push(p);
                counts.push(c);
                kept_ids.push(i);
            }
        }
        let next = lexicon.rebuild(words, probs, counts)?;

        let mut moved = vec![0.0f64; lexicon.len()];
        for (i, p) in lexicon.probs().iter().enumerate() {
            moved[i] = *p;
        }
        for (new_id, &old_id) in kept_ids.iter().enumerate() {
            moved[old_id] -= next.probs()[new_id];
        }
        let max_delta = moved.iter().fold(0.0f64, |m, d| m.max(d.abs()));

        let sum = next.prob_sum();
        if (sum - 1.0).abs() > crate::lexicon::SUM_TOLERANCE {
            return Err(Error::Invariant(format!("iteration {iteration}: probabilities sum to {sum}")));
        }
        log::debug!(
            "em iteration {iteration}: log-likelihood {:.6}, vocab {}, max delta {max_delta:.3e}",
            e.log_likelihood,
            next.len()
        );
        log.push(IterationRecord {
            iteration,
            log_likelihood: e.log_likelihood,
            vocab_size: next.len(),
            max_delta,
        });
        lexicon = next;
        if max_delta <= cfg.tol {
            break;
        }
    }
    Ok((lexicon, log))
}

/// Viterbi segmentation of every sequence, in input order.
pub fn segment_corpus(seqs: &[Sequence], lexicon: &Lexicon) -> Vec<Segmentation> {
    seqs.par_iter()
        .map(|s| viterbi_str(s.as_str(), lexicon).0)
        .collect()
}
