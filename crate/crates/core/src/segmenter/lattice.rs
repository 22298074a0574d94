use std::collections::BTreeMap;

use crate::corpus_io::{char_offsets, Sequence};
use crate::Lexicon;

use super::Segmentation;

/// One arc of the segmentation lattice: a token from the arc's start
/// position to `end`.
#[derive(Debug, Clone, Copy)]
struct Arc {
    end: usize,
    /// Lexicon id; `None` for a fallback single symbol.
    word: Option<u32>,
    log_prob: f64,
}

/// Arcs grouped by start position (CSR layout).
struct Graph {
    first: Vec<usize>,
    arcs: Vec<Arc>,
}

impl Graph {
    fn build(text: &str, lexicon: &Lexicon) -> Graph {
        let off = char_offsets(text);
        let n = off.len() - 1;
        let max_len = lexicon.max_len();
        let mut first = Vec::with_capacity(n + 1);
        let mut arcs = Vec::with_capacity(n * 2);
        for i in 0..n {
            first.push(arcs.len());
            for j in (i + 1)..=(i + max_len).min(n) {
                match lexicon.id(&text[off[i]..off[j]]) {
                    Some(id) => arcs.push(Arc {
                        end: j,
                        word: Some(id),
                        log_prob: lexicon.log_prob_by_id(id),
                    }),
                    None if j == i + 1 => arcs.push(Arc {
                        end: j,
                        word: None,
                        log_prob: lexicon.fallback_log_prob(),
                    }),
                    None => {}
                }
            }
        }
        first.push(arcs.len());
        Graph { first, arcs }
    }

    fn len(&self) -> usize {
        self.first.len() - 1
    }

    fn from(&self, i: usize) -> &[Arc] {
        &self.arcs[self.first[i]..self.first[i + 1]]
    }
}

/// Scores within this relative distance are tied and fall through to the
/// structural tie-break.
const TIE_EPS: f64 = 1e-12;

pub(crate) fn tied(a: f64, b: f64) -> bool {
    a == b || a.is_finite() && b.is_finite() && (a - b).abs() <= TIE_EPS * (1.0 + a.abs().max(b.abs()))
}

/// Best-scoring segmentation of `seq` over lexicon words and fallback
/// single symbols. Ties go to fewer tokens, then to the longest leftmost
/// token. The returned log-probability is summed left to right, exactly as
/// [`super::seg_log_prob`] does.
pub fn viterbi_segment(seq: &Sequence, lexicon: &Lexicon) -> (Segmentation, f64) {
    viterbi_str(seq.as_str(), lexicon)
}

/// [`viterbi_segment`] over a bare string. Panics on an empty string.
pub fn viterbi_str(text: &str, lexicon: &Lexicon) -> (Segmentation, f64) {
    let g = Graph::build(text, lexicon);
    let n = g.len();
    assert!(n > 0, "cannot segment an empty sequence");

    // best completion of the suffix starting at i: (score, tokens, arc)
    let mut score = vec![f64::NEG_INFINITY; n + 1];
    let mut tokens = vec![usize::MAX; n + 1];
    let mut choice = vec![usize::MAX; n + 1];
    score[n] = 0.0;
    tokens[n] = 0;
    for i in (0..n).rev() {
        for (k, arc) in g.from(i).iter().enumerate() {
            let s = arc.log_prob + score[arc.end];
            let t = tokens[arc.end] + 1;
            let better = if choice[i] == usize::MAX {
                true
            } else if tied(s, score[i]) {
                let cur_end = g.from(i)[choice[i]].end;
                t < tokens[i] || (t == tokens[i] && arc.end > cur_end)
            } else {
                s > score[i]
            };
            if better {
                score[i] = s;
                tokens[i] = t;
                choice[i] = k;
            }
        }
    }

    let mut lengths = Vec::with_capacity(tokens[0]);
    let mut total = 0.0;
    let mut i = 0;
    while i < n {
        let arc = g.from(i)[choice[i]];
        total += arc.log_prob;
        lengths.push(arc.end - i);
        i = arc.end;
    }
    let seg = Segmentation::from_lengths(lengths).expect("viterbi path tiles the sequence");
    (seg, total)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Forward/backward log-sums over all segmentations of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SegLattice {
    /// `alpha[j]`: log-sum over segmentations of the prefix `[0, j)`.
    pub alpha: Vec<f64>,
    /// `beta[i]`: log-sum over segmentations of the suffix `[i, n)`.
    pub beta: Vec<f64>,
    pub seq_log_marginal: f64,
}

/// Runs forward-backward and calls `visit(word, posterior)` for every arc
/// carrying a lexicon word.
pub(crate) fn posteriors(text: &str, lexicon: &Lexicon, mut visit: impl FnMut(Option<u32>, usize, usize, f64)) -> SegLattice {
    let g = Graph::build(text, lexicon);
    let n = g.len();
    let mut alpha = vec![f64::NEG_INFINITY; n + 1];
    let mut beta = vec![f64::NEG_INFINITY; n + 1];
    alpha[0] = 0.0;
    for i in 0..n {
        if alpha[i] == f64::NEG_INFINITY {
            continue;
        }
        for arc in g.from(i) {
            alpha[arc.end] = log_add(alpha[arc.end], alpha[i] + arc.log_prob);
        }
    }
    beta[n] = 0.0;
    for i in (0..n).rev() {
        for arc in g.from(i) {
            beta[i] = log_add(beta[i], arc.log_prob + beta[arc.end]);
        }
    }
    let z = alpha[n];
    if z.is_finite() {
        for i in 0..n {
            for arc in g.from(i) {
                let post = (alpha[i] + arc.log_prob + beta[arc.end] - z).exp();
                visit(arc.word, i, arc.end, post);
            }
        }
    }
    SegLattice {
        alpha,
        beta,
        seq_log_marginal: z,
    }
}

/// Lattice sums and expected token counts for `seq`. Fallback single
/// symbols appear in the counts under their own spelling, so
/// `Σ count(w)·|w| = |seq|`.
pub fn forward_backward(seq: &Sequence, lexicon: &Lexicon) -> (SegLattice, BTreeMap<String, f64>) {
    let text = seq.as_str();
    let off = char_offsets(text);
    let mut counts = BTreeMap::new();
    let lattice = posteriors(text, lexicon, |word, i, j, post| {
        let key = match word {
            Some(id) => lexicon.word(id).to_string(),
            None => text[off[i]..off[j]].to_string(),
        };
        *counts.entry(key).or_insert(0.0) += post;
    });
    (lattice, counts)
}
