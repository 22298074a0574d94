//! Lexicon TSV: `word \t probability [\t count]`, rows sorted by descending
//! probability then word. Lines starting with `#` are comments; the writer
//! records `# max_len=N` and `# fallback_log_prob=X` there and the reader
//! honours them.

use std::collections::HashSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{stable_sum, Lexicon, SUM_TOLERANCE};
use crate::{Error, Result};

/// Sums further than this from 1 are an error unless renormalization was
/// requested.
const READ_SUM_TOLERANCE: f64 = 1e-6;

fn fmt_prob(p: f64) -> String {
    // both forms are shortest round-trip representations
    if p >= 1e-5 {
        format!("{p}")
    } else {
        format!("{p:e}")
    }
}

/// Writes `lexicon` as TSV. Each entry of `header` becomes a `# ` comment
/// line ahead of the metadata.
pub fn write_lexicon(lexicon: &Lexicon, path: impl AsRef<Path>, header: &[String]) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(fs::File::create(path).map_err(io)?);
    for line in header {
        writeln!(w, "# {line}").map_err(io)?;
    }
    writeln!(w, "# max_len={}", lexicon.max_len()).map_err(io)?;
    writeln!(w, "# fallback_log_prob={}", lexicon.fallback_log_prob()).map_err(io)?;
    let counts = lexicon.counts();
    for id in lexicon.ranked_ids() {
        let i = id as usize;
        write!(w, "{}\t{}", lexicon.word(id), fmt_prob(lexicon.probs()[i])).map_err(io)?;
        if let Some(c) = counts {
            write!(w, "\t{}", c[i]).map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a lexicon TSV. Probabilities summing to 1 within 1e-6 are
/// accepted (and renormalized onto the 1e-9 invariant); larger deviations
/// fail unless `renormalize` is set.
pub fn read_lexicon(path: impl AsRef<Path>, renormalize: bool) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut max_len = None;
    let mut fallback = None;
    let mut words = Vec::new();
    let mut probs = Vec::new();
    let mut counts = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in text.lines().enumerate() {
        let n = n + 1;
        let line = line.trim_end_matches('\r');
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                match k.trim() {
                    "max_len" => {
                        max_len = Some(v.trim().parse::<usize>().map_err(|e| {
                            Error::parse(path, n, format!("bad max_len: {e}"))
                        })?)
                    }
                    "fallback_log_prob" => {
                        fallback = Some(v.trim().parse::<f64>().map_err(|e| {
                            Error::parse(path, n, format!("bad fallback_log_prob: {e}"))
                        })?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&cols.len()) {
            return Err(Error::parse(path, n, format!("expected 2 or 3 columns, got {}", cols.len())));
        }
        let word = cols[0];
        if word.is_empty() {
            return Err(Error::parse(path, n, "empty word"));
        }
        if !seen.insert(word.to_string()) {
            return Err(Error::parse(path, n, format!("duplicate word {word:?}")));
        }
        let p: f64 = cols[1]
            .parse()
            .map_err(|e| Error::parse(path, n, format!("bad probability: {e}")))?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::parse(path, n, format!("probability {p} outside (0, 1]")));
        }
        match cols.get(2) {
            Some(c) => {
                if counts.len() != words.len() {
                    return Err(Error::parse(path, n, "count column present on only some rows"));
                }
                counts.push(
                    c.parse::<f64>()
                        .map_err(|e| Error::parse(path, n, format!("bad count: {e}")))?,
                );
            }
            None if !counts.is_empty() => {
                return Err(Error::parse(path, n, "count column present on only some rows"))
            }
            None => {}
        }
        words.push(word.to_string());
        probs.push(p);
    }
    if words.is_empty() {
        return Err(Error::Empty(format!("{}: no lexicon rows", path.display())));
    }
    let sum = stable_sum(probs.iter().copied());
    let dev = (sum - 1.0).abs();
    let mut lex = if dev <= SUM_TOLERANCE {
        Lexicon::from_probs(words.into_iter().zip(probs))?
    } else if dev <= READ_SUM_TOLERANCE || renormalize {
        if dev > READ_SUM_TOLERANCE {
            log::warn!("{}: probabilities sum to {sum}; renormalizing", path.display());
        }
        Lexicon::from_weights(words.into_iter().zip(probs))?
    } else {
        return Err(Error::InvalidLexicon(format!(
            "{}: probabilities sum to {sum}",
            path.display()
        )));
    };
    if !counts.is_empty() {
        lex = lex.with_counts(counts)?;
    }
    if let Some(m) = max_len {
        lex = lex.with_max_len(m)?;
    }
    if let Some(f) = fallback {
        lex = lex.with_fallback_log_prob(f)?;
    }
    Ok(lex)
}
