//! Unigram segmentation: scoring, Viterbi decoding, lattice expectations
//! and EM training.

mod io;
mod lattice;
mod train;

use serde::Serialize;

use crate::corpus_io::{char_offsets, Sequence};
use crate::{Error, Lexicon, Result};

pub use io::{format_tokens, parse_tokens, read_segmentations, write_segmentations, SegmentedLine};
pub use lattice::{forward_backward, viterbi_segment, viterbi_str, SegLattice};
pub(crate) use lattice::tied as lattice_tied;
pub use train::{em_train, segment_corpus, IterationRecord, TrainConfig, TrainMode};

/// Longest sequence [`enumerate_segmentations`] accepts.
pub const MAX_ENUMERATE_LEN: usize = 20;

/// A partition of `[0, len)` into contiguous non-empty spans, stored as
/// the cut points `0 = c₀ < c₁ < … < c_k = len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Segmentation {
    cuts: Vec<usize>,
}

impl Segmentation {
    /// The single-token segmentation of a length-`len` sequence.
    pub fn whole(len: usize) -> Result<Self> {
        Self::from_boundaries(len, [])
    }

    /// One token per symbol.
    pub fn per_symbol(len: usize) -> Result<Self> {
        Self::from_boundaries(len, 1..len)
    }

    /// Builds from internal boundary positions (each in `1..len`). Order is
    /// not required; duplicates are rejected.
    pub fn from_boundaries(len: usize, internal: impl IntoIterator<Item = usize>) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidSegmentation("empty sequence".into()));
        }
        let mut inner: Vec<usize> = internal.into_iter().collect();
        inner.sort_unstable();
        for w in inner.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSegmentation(format!("duplicate boundary {}", w[0])));
            }
        }
        if let Some(&b) = inner.iter().find(|&&b| b == 0 || b >= len) {
            return Err(Error::InvalidSegmentation(format!(
                "boundary {b} outside 1..{len}"
            )));
        }
        let mut cuts = Vec::with_capacity(inner.len() + 2);
        cuts.push(0);
        cuts.extend(inner);
        cuts.push(len);
        Ok(Segmentation { cuts })
    }

    /// Builds from half-open spans, which must tile `[0, len)` in order.
    pub fn from_spans(len: usize, spans: &[(usize, usize)]) -> Result<Self> {
        let mut expect = 0;
        for &(s, e) in spans {
            if s != expect || e <= s {
                return Err(Error::InvalidSegmentation(format!(
                    "span ({s}, {e}) does not continue at {expect}"
                )));
            }
            expect = e;
        }
        if expect != len || len == 0 {
            return Err(Error::InvalidSegmentation(format!(
                "spans cover {expect} of {len} symbols"
            )));
        }
        let mut cuts = vec![0];
        cuts.extend(spans.iter().map(|&(_, e)| e));
        Ok(Segmentation { cuts })
    }

    /// Builds from token lengths in order.
    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut cuts = vec![0];
        for l in lengths {
            if l == 0 {
                return Err(Error::InvalidSegmentation("zero-length token".into()));
            }
            cuts.push(cuts.last().unwrap() + l);
        }
        if cuts.len() == 1 {
            return Err(Error::InvalidSegmentation("no tokens".into()));
        }
        Ok(Segmentation { cuts })
    }

    /// Sequence length covered.
    pub fn len(&self) -> usize {
        *self.cuts.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_tokens(&self) -> usize {
        self.cuts.len() - 1
    }

    /// Boundaries strictly inside the sequence, ascending.
    pub fn internal_boundaries(&self) -> &[usize] {
        &self.cuts[1..self.cuts.len() - 1]
    }

    pub fn spans(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cuts.windows(2).map(|w| (w[0], w[1]))
    }

    /// Token strings of `text` under this segmentation.
    pub fn tokens<'a>(&self, text: &'a str) -> Result<Vec<&'a str>> {
        let off = char_offsets(text);
        if off.len() - 1 != self.len() {
            return Err(Error::InvalidSegmentation(format!(
                "segmentation covers {} symbols, sequence has {}",
                self.len(),
                off.len() - 1
            )));
        }
        Ok(self.spans().map(|(s, e)| &text[off[s]..off[e]]).collect())
    }
}

/// Log-probability of `seg` under the unigram model: the sum of token
/// log-probabilities. Unknown single symbols are charged the lexicon's
/// fallback; unknown longer tokens make the result `-inf`.
pub fn seg_log_prob(seq: &Sequence, seg: &Segmentation, lexicon: &Lexicon) -> Result<f64> {
    let mut total = 0.0;
    for tok in seg.tokens(seq.as_str())? {
        total += match lexicon.log_prob(tok) {
            Some(lp) => lp,
            None if tok.chars().nth(1).is_none() => lexicon.fallback_log_prob(),
            None => return Ok(f64::NEG_INFINITY),
        };
    }
    Ok(total)
}

/// Every segmentation of `seq` with its [`seg_log_prob`], in order of the
/// boundary bitmask (bit `k` = boundary after symbol `k + 1`).
pub fn enumerate_segmentations(seq: &Sequence, lexicon: &Lexicon) -> Result<Vec<(Segmentation, f64)>> {
    let n = seq.len();
    if n > MAX_ENUMERATE_LEN {
        return Err(Error::TooLong {
            len: n,
            max: MAX_ENUMERATE_LEN,
        });
    }
    let gaps = n - 1;
    (0u32..1 << gaps)
        .map(|mask| {
            let seg = Segmentation::from_boundaries(n, (0..gaps).filter(|k| mask >> k & 1 == 1).map(|k| k + 1))?;
            let lp = seg_log_prob(seq, &seg, lexicon)?;
            Ok((seg, lp))
        })
        .collect()
}
