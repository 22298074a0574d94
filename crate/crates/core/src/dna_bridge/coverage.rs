use serde::Serialize;

use crate::corpus_io::{Alphabet, Corpus, Sequence, Window};
use crate::segmenter::lattice_tied;
use crate::{Error, Lexicon, Result, Segmentation};

use super::GeneticCode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageConfig {
    /// Score of one red (untranslated) nucleotide.
    pub red_penalty: f64,
    /// Added per nucleotide of a green span.
    pub green_bonus: f64,
    /// Count flagged remainder windows in reports.
    pub include_remainder: bool,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig {
            red_penalty: 1e-6f64.ln(),
            green_bonus: 0.0,
            include_remainder: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanKind {
    Green,
    Red,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageSpan {
    pub start: usize,
    pub end: usize,
    pub kind: SpanKind,
    /// The protein word for green spans, the nucleotide for red ones.
    pub token: String,
}

/// Green/red tiling of one DNA sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageSegmentation {
    pub spans: Vec<CoverageSpan>,
    dna: String,
}

impl CoverageSegmentation {
    pub fn len(&self) -> usize {
        self.dna.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dna.is_empty()
    }

    pub fn green_letters(&self) -> usize {
        self.spans
            .iter()
            .filter(|s| s.kind == SpanKind::Green)
            .map(|s| s.end - s.start)
            .sum()
    }

    pub fn coverage_pct(&self) -> f64 {
        self.green_letters() as f64 / self.len() as f64
    }

    /// Display form: green spans as `[DNA=WORD]`, runs of red nucleotides
    /// coalesced in lowercase, items separated by single spaces.
    pub fn annotate(&self) -> String {
        let mut items: Vec<String> = Vec::new();
        let mut red = String::new();
        for span in &self.spans {
            match span.kind {
                SpanKind::Red => red.push_str(&self.dna[span.start..span.end].to_ascii_lowercase()),
                SpanKind::Green => {
                    if !red.is_empty() {
                        items.push(std::mem::take(&mut red));
                    }
                    items.push(format!("[{}={}]", &self.dna[span.start..span.end], span.token));
                }
            }
        }
        if !red.is_empty() {
            items.push(red);
        }
        items.join(" ")
    }

    /// Maximal runs of adjacent green spans, each as `(start, end, words)`.
    pub fn green_runs(&self) -> Vec<(usize, usize, Vec<&str>)> {
        let mut runs: Vec<(usize, usize, Vec<&str>)> = Vec::new();
        for span in self.spans.iter().filter(|s| s.kind == SpanKind::Green) {
            match runs.last_mut() {
                Some(run) if run.1 == span.start => {
                    run.1 = span.end;
                    run.2.push(&span.token);
                }
                _ => runs.push((span.start, span.end, vec![&span.token])),
            }
        }
        runs
    }
}

fn check_dna(dna: &Sequence) -> Result<&[u8]> {
    let bytes = dna.as_str().as_bytes();
    match bytes.iter().find(|b| !matches!(b, b'A' | b'C' | b'G' | b'T')) {
        Some(&b) => Err(Error::OutOfAlphabet {
            id: dna.id().to_string(),
            ch: b as char,
            alphabet: "dna4".into(),
        }),
        None => Ok(bytes),
    }
}

/// Maximum-score tiling of `dna` into green spans (in-frame translations
/// that are lexicon words, stop-free, up to `lexicon.max_len()` residues)
/// and red single nucleotides.
///
/// A green span of `k` residues scores `log P(word) + 3k·green_bonus`, a
/// red nucleotide `red_penalty`. Ties prefer more green letters, then the
/// longest leftmost span.
pub fn coverage_segment(
    dna: &Sequence,
    lexicon: &Lexicon,
    code: &GeneticCode,
    cfg: &CoverageConfig,
) -> Result<CoverageSegmentation> {
    let bytes = check_dna(dna)?;
    let n = bytes.len();
    let residues: Vec<Option<char>> = (0..n.saturating_sub(2))
        .map(|i| code.amino(&bytes[i..i + 3]))
        .collect::<Result<_>>()?;
    let max_words = lexicon.max_len();

    // best suffix from i: score, green letters, chosen step length, word
    let mut score = vec![f64::NEG_INFINITY; n + 1];
    let mut green = vec![0usize; n + 1];
    let mut step = vec![0usize; n + 1];
    let mut word_at: Vec<Option<String>> = vec![None; n + 1];
    score[n] = 0.0;
    for i in (0..n).rev() {
        score[i] = cfg.red_penalty + score[i + 1];
        green[i] = green[i + 1];
        step[i] = 1;
        let mut word = String::new();
        for k in 1..=max_words {
            let p = i + 3 * (k - 1);
            let Some(Some(aa)) = residues.get(p) else { break };
            word.push(*aa);
            let Some(lp) = lexicon.log_prob(&word) else { continue };
            let end = i + 3 * k;
            let s = lp + (3 * k) as f64 * cfg.green_bonus + score[end];
            let g = 3 * k + green[end];
            let better = if lattice_tied(s, score[i]) {
                g > green[i] || (g == green[i] && 3 * k > step[i])
            } else {
                s > score[i]
            };
            if better {
                score[i] = s;
                green[i] = g;
                step[i] = 3 * k;
                word_at[i] = Some(word.clone());
            }
        }
        if step[i] == 1 {
            word_at[i] = None;
        }
    }

    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        let end = i + step[i];
        let span = match word_at[i].take() {
            Some(word) => CoverageSpan {
                start: i,
                end,
                kind: SpanKind::Green,
                token: word,
            },
            None => CoverageSpan {
                start: i,
                end,
                kind: SpanKind::Red,
                token: (bytes[i] as char).to_string(),
            },
        };
        spans.push(span);
        i = end;
    }
    let out = CoverageSegmentation {
        spans,
        dna: dna.as_str().to_string(),
    };
    verify_green(&out, lexicon, code)?;
    Ok(out)
}

/// Every green span must re-translate to its lexicon word.
fn verify_green(seg: &CoverageSegmentation, lexicon: &Lexicon, code: &GeneticCode) -> Result<()> {
    for s in seg.spans.iter().filter(|s| s.kind == SpanKind::Green) {
        let ok = (s.end - s.start) % 3 == 0
            && matches!(code.translate(&seg.dna[s.start..s.end])?, super::Translation::Protein(p) if p == s.token)
            && lexicon.contains(&s.token);
        if !ok {
            return Err(Error::Invariant(format!(
                "green span {}..{} does not translate to lexicon word {:?}",
                s.start, s.end, s.token
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowCoverage {
    pub window_id: String,
    pub coverage_pct: f64,
    pub green_letters: usize,
    pub length: usize,
}

pub const HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Green letters over all letters of the counted windows.
    pub coverage_pct: f64,
    pub window_width: usize,
    pub per_window: Vec<WindowCoverage>,
    /// Windows per coverage bin `[k/10, (k+1)/10)`, the last bin closed.
    pub histogram: [u64; HISTOGRAM_BINS],
}

impl CoverageReport {
    /// `(bin_low, bin_high, count, fraction)` per bin.
    pub fn histogram_rows(&self) -> Vec<(f64, f64, u64, f64)> {
        let total: u64 = self.histogram.iter().sum();
        self.histogram
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let frac = if total == 0 { 0.0 } else { c as f64 / total as f64 };
                (k as f64 / 10.0, (k + 1) as f64 / 10.0, c, frac)
            })
            .collect()
    }

    pub fn mean_window_coverage(&self) -> f64 {
        let n = self.per_window.len() as f64;
        self.per_window.iter().map(|w| w.coverage_pct).sum::<f64>() / n
    }
}

fn bin(green: usize, len: usize) -> usize {
    (green * HISTOGRAM_BINS / len).min(HISTOGRAM_BINS - 1)
}

/// Coverage of each window and the distribution over windows. Remainder
/// windows are skipped unless `cfg.include_remainder`.
pub fn coverage_report(
    windows: &[Window],
    lexicon: &Lexicon,
    code: &GeneticCode,
    cfg: &CoverageConfig,
) -> Result<CoverageReport> {
    use rayon::prelude::*;
    let counted: Vec<&Window> = windows
        .iter()
        .filter(|w| cfg.include_remainder || !w.remainder)
        .collect();
    if counted.is_empty() {
        return Err(Error::Empty("no windows to report on".into()));
    }
    let per_window: Vec<WindowCoverage> = counted
        .par_iter()
        .map(|w| {
            let seg = coverage_segment(&w.sequence, lexicon, code, cfg)?;
            Ok(WindowCoverage {
                window_id: w.sequence.id().to_string(),
                coverage_pct: seg.coverage_pct(),
                green_letters: seg.green_letters(),
                length: seg.len(),
            })
        })
        .collect::<Result<_>>()?;
    let mut histogram = [0u64; HISTOGRAM_BINS];
    for w in &per_window {
        histogram[bin(w.green_letters, w.length)] += 1;
    }
    let green: usize = per_window.iter().map(|w| w.green_letters).sum();
    let letters: usize = per_window.iter().map(|w| w.length).sum();
    Ok(CoverageReport {
        coverage_pct: green as f64 / letters as f64,
        window_width: counted.iter().map(|w| w.sequence.len()).max().unwrap_or(0),
        per_window,
        histogram,
    })
}

/// A protein sequence read off one green run, with gold boundaries at the
/// joints between its words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTripRecord {
    pub protein: Sequence,
    pub gold: Segmentation,
    pub source_id: String,
    /// Nucleotide offset of the run in the source sequence.
    pub dna_start: usize,
}

/// Converts the green runs of every DNA sequence into protein sequences
/// whose gold segmentation is the word sequence of the run.
pub fn dna_roundtrip_corpus(
    dna: &[Sequence],
    lexicon: &Lexicon,
    code: &GeneticCode,
    cfg: &CoverageConfig,
) -> Result<Vec<RoundTripRecord>> {
    let mut out = Vec::new();
    for seq in dna {
        let seg = coverage_segment(seq, lexicon, code, cfg)?;
        for (start, _, words) in seg.green_runs() {
            let protein = Sequence::new(format!("{}_g{}", seq.id(), start), words.concat())?;
            let gold = Segmentation::from_lengths(words.iter().map(|w| w.chars().count()))?;
            out.push(RoundTripRecord {
                protein,
                gold,
                source_id: seq.id().to_string(),
                dna_start: start,
            });
        }
    }
    Ok(out)
}

/// The proteins of a round trip as an amino20 corpus.
pub fn roundtrip_to_corpus(records: &[RoundTripRecord]) -> Result<Corpus> {
    Corpus::new(records.iter().map(|r| r.protein.clone()).collect(), Alphabet::amino20())
}
